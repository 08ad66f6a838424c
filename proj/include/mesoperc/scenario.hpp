#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mesoperc/domains.hpp"
#include "mesoperc/geometry.hpp"

namespace mesoperc {

enum class Kind { validate, subdivide, pack, modulus, cardy, crossing, observable, contour, rsw, render };

std::string kind_name(Kind k);
/// Accepts the subcommand names; "cardy-compare" is an alias of "cardy".
Kind parse_kind(const std::string& name);

/// One experiment. Loaded from TOML:
///
///   kind = "cardy"            seed = 1        trials = 100000     p = 0.5
///   out = "runs/cardy"
///   [lattice]  name = "fig1" | file = "mesh.txt"   delta = 1.0   N = 1
///              window = [x0, y0, x1, y1]           level = 0
///   [domain]   shape = "window" | "rhombus" | "rectangle" | "triangle"
///              size = 100   rows = 30   cols = 52   marks = [[x, y], ...]
///   [contour]  center = [x, y]   radius = 0.2
///   [rsw]      deltas = [...]   Ns = [...]   lambda = 2.0   height = 1.0
///              center = [x, y]   angles = [0.0, 90.0]   (degrees)
///   [render]   embedding = "source" | "packing"   circles = false   shade = true
struct Scenario {
  Kind kind = Kind::validate;
  bool kind_declared = false;  // the file named a kind

  std::string lattice_name;
  std::string lattice_file;
  double delta = 1;
  int N = 1;
  std::optional<Rect> window;
  int level = 0;

  std::string shape = "window";
  int size = 0;
  int rows = 0, cols = 0;
  std::vector<Point> marks;

  std::int64_t trials = 0;
  std::optional<std::uint64_t> seed;
  double p = 0.5;

  Point contour_center{0, 0};
  double contour_radius = 0;

  std::vector<double> rsw_deltas;
  std::vector<int> rsw_Ns;
  double rsw_lambda = 2;
  double rsw_height = 1;
  Point rsw_center{0.5, 0.5};
  std::vector<double> rsw_angles_deg{0.0};

  std::string render_embedding = "source";
  bool render_circles = false;
  bool render_shade = true;

  std::string out = "out";
};

/// Throws ParseError on malformed TOML or unknown keys, InvalidArgument on
/// inconsistent parameters.
Scenario parse_scenario(const std::string& toml_text, const std::string& origin = "<string>");
/// A relative lattice.file is taken relative to the scenario file.
Scenario load_scenario(const std::string& path);
std::string scenario_to_toml(const Scenario& s);
/// Completeness and consistency for the chosen kind.
void check_scenario(const Scenario& s);

struct RunResult {
  nlohmann::json summary;
  std::string table;                 // CSV with a commented header recording the run
  std::optional<std::string> figure;  // SVG
  std::string line;                   // one-line summary
};

RunResult run(const Scenario& s);
/// summary.json, table.csv, figure.svg and scenario.toml under s.out.
void write_artifacts(const Scenario& s, const RunResult& r);

/// Marked quadrilateral or triangle built from the lattice and domain sections,
/// before any subdivision.
QuadDomain scenario_quad(const Scenario& s);
TriangleDomain scenario_triangle(const Scenario& s);

}  // namespace mesoperc
