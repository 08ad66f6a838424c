#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "mesoperc/error.hpp"
#include "mesoperc/scenario.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mesoperc;

int main(int argc, char** argv) {
  CLI::App app{"Critical percolation on periodic triangulations: experiments and figures"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::string> out;
  std::optional<int> threads;

  const char* kinds[] = {"validate", "subdivide", "pack", "modulus", "cardy",
                         "crossing", "observable", "contour", "rsw", "render"};
  for (const char* name : kinds) {
    CLI::App* sub = app.add_subcommand(name, std::string("run a '") + name + "' scenario");
    if (std::string(name) == "cardy") sub->alias("cardy-compare");
    sub->add_option("--config", config, "scenario TOML file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--trials", trials, "override the number of trials");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: MESOPERC_THREADS)")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Scenario s = load_scenario(config);
    const Kind kind = parse_kind(command);
    if (s.kind_declared && s.kind != kind) {
      throw InvalidArgument("scenario kind '" + kind_name(s.kind) + "' does not match subcommand '" + command + "'");
    }
    s.kind = kind;
    if (seed) s.seed = *seed;
    if (trials) s.trials = *trials;
    if (out) s.out = *out;
    if (!threads) {
      if (const char* env = std::getenv("MESOPERC_THREADS")) threads = std::atoi(env);
    }
#ifdef _OPENMP
    if (threads && *threads > 0) omp_set_num_threads(*threads);
#endif
    const RunResult r = run(s);
    write_artifacts(s, r);
    std::cout << r.line << '\n';
    if (r.summary.contains("ok") && !r.summary["ok"].get<bool>()) return 1;
    return 0;
  } catch (const Error& e) {
    std::cerr << "mesoperc " << command << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mesoperc " << command << ": " << e.what() << '\n';
    return 3;
  }
}
