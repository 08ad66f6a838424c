#include "mesoperc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "mesoperc/conformal.hpp"
#include "mesoperc/error.hpp"
#include "mesoperc/lattices.hpp"
#include "mesoperc/mesh_io.hpp"
#include "mesoperc/mesoscopic.hpp"
#include "mesoperc/packing.hpp"
#include "mesoperc/percolation.hpp"
#include "mesoperc/render.hpp"
#include "mesoperc/subdivision.hpp"

namespace mesoperc {

namespace {

const char* const kKindNames[] = {"validate", "subdivide", "pack",       "modulus", "cardy",
                                  "crossing", "observable", "contour", "rsw",     "render"};

bool stochastic(const Scenario& s) {
  switch (s.kind) {
    case Kind::cardy:
    case Kind::crossing:
    case Kind::contour:
    case Kind::rsw:
      return true;
    case Kind::observable:
      return s.trials > 0;
    default:
      return false;
  }
}

bool quad_kind(Kind k) { return k == Kind::modulus || k == Kind::cardy || k == Kind::crossing; }
bool triangle_kind(Kind k) { return k == Kind::observable || k == Kind::contour; }

// ---- TOML reading ----------------------------------------------------------

[[noreturn]] void parse_fail(const std::string& origin, const std::string& what) {
  throw ParseError(origin + ": " + what);
}

void reject_unknown(const toml::table& t, const std::set<std::string>& allowed, const std::string& where,
                    const std::string& origin) {
  for (const auto& [k, v] : t) {
    if (!allowed.count(std::string(k.str()))) parse_fail(origin, "unknown key '" + std::string(k.str()) + "' in " + where);
  }
}

double number(const toml::node& n, const std::string& key, const std::string& origin) {
  if (auto v = n.value<double>()) return *v;
  parse_fail(origin, "'" + key + "' must be a number");
}

std::int64_t integer(const toml::node& n, const std::string& key, const std::string& origin) {
  if (n.is_integer()) return n.as_integer()->get();
  parse_fail(origin, "'" + key + "' must be an integer");
}

std::string text(const toml::node& n, const std::string& key, const std::string& origin) {
  if (n.is_string()) return n.as_string()->get();
  parse_fail(origin, "'" + key + "' must be a string");
}

bool boolean(const toml::node& n, const std::string& key, const std::string& origin) {
  if (n.is_boolean()) return n.as_boolean()->get();
  parse_fail(origin, "'" + key + "' must be true or false");
}

std::vector<double> numbers(const toml::node& n, const std::string& key, const std::string& origin) {
  const toml::array* a = n.as_array();
  if (!a) parse_fail(origin, "'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const toml::node& x : *a) out.push_back(number(x, key, origin));
  return out;
}

Point point(const toml::node& n, const std::string& key, const std::string& origin) {
  const std::vector<double> v = numbers(n, key, origin);
  if (v.size() != 2) parse_fail(origin, "'" + key + "' must be [x, y]");
  return {v[0], v[1]};
}

// ---- TOML writing ----------------------------------------------------------

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string point_toml(Point p) { return "[" + num17(p.real()) + ", " + num17(p.imag()) + "]"; }

template <class T, class F>
std::string list_toml(const std::vector<T>& v, F f) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
  return s + "]";
}

// ---- domains ---------------------------------------------------------------

EmbeddedMesh load_lattice(const Scenario& s) {
  if (!s.lattice_file.empty()) return build_embedded(load_mesh_file(s.lattice_file));
  return builtin_lattice(s.lattice_name);
}

/// Planar mesh of the window shape and the id bound for marks (vertices of G).
std::pair<EmbeddedMesh, int> window_mesh(const Scenario& s) {
  EmbeddedMesh lattice = load_lattice(s);
  if (!lattice.triangulation.is_torus()) return {lattice, -1};
  if (!s.window) throw InvalidArgument("scenario: a periodic lattice needs lattice.window");
  MesoscopicLattice m = build_mesoscopic(lattice.triangulation, lattice.embedding, s.delta, s.N, *s.window);
  const int coarse = m.coarse.triangulation.vertex_count();
  if (s.N == 1) return {std::move(m.coarse), coarse};
  return {std::move(m.fine), coarse};
}

EmbeddedMesh subdivided(EmbeddedMesh m, int n) {
  for (int i = 0; i < n; ++i) m = subdivide(m.triangulation, m.embedding);
  return m;
}

/// Target modulus when the domain shape fixes it.
std::optional<double> nominal_modulus(const Scenario& s) {
  if (s.shape == "rhombus") return 1.0;
  if (s.shape == "rectangle") return 2.0 * s.cols / (std::sqrt(3.0) * s.rows);
  return std::nullopt;
}

// ---- output helpers ---------------------------------------------------------

std::string fmt(double x, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

nlohmann::json scenario_json(const Scenario& s) {
  nlohmann::json j = {{"kind", kind_name(s.kind)}, {"trials", s.trials}, {"p", s.p}, {"level", s.level}};
  if (s.seed) j["seed"] = *s.seed;
  if (!s.lattice_name.empty()) j["lattice"] = s.lattice_name;
  if (!s.lattice_file.empty()) j["lattice_file"] = s.lattice_file;
  j["shape"] = s.shape;
  if (s.shape == "window") {
    j["delta"] = s.delta;
    j["N"] = s.N;
    if (s.window) j["window"] = {s.window->x0, s.window->y0, s.window->x1, s.window->y1};
  }
  return j;
}

std::string csv_header(const Scenario& s) {
  std::string h = "# mesoperc " + kind_name(s.kind);
  if (s.seed) h += " seed=" + std::to_string(*s.seed);
  h += " trials=" + std::to_string(s.trials) + "\n";
  h += "# scenario " + scenario_json(s).dump() + "\n";
  return h;
}

// ---- runners ---------------------------------------------------------------

RunResult run_validate(const Scenario& s) {
  const MeshData m = s.lattice_file.empty()
                         ? [&] {
                             const EmbeddedMesh l = builtin_lattice(s.lattice_name);
                             return to_mesh_data(l.triangulation, l.embedding);
                           }()
                         : load_mesh_file(s.lattice_file);
  const ValidationReport r = validate(m);
  RunResult out;
  out.summary = {{"ok", r.ok()},
                 {"violations", r.violations},
                 {"vertices", m.positions.size()},
                 {"faces", m.connectivity.faces.size()},
                 {"torus", m.periods.has_value()}};
  out.table = csv_header(s) + "violation\n";
  for (const std::string& v : r.violations) out.table += "\"" + v + "\"\n";
  out.line = r.ok() ? "valid: " + std::to_string(m.positions.size()) + " vertices, " +
                          std::to_string(m.connectivity.faces.size()) + " faces"
                    : "invalid: " + std::to_string(r.violations.size()) + " violation(s), first: " + r.violations.front();
  return out;
}

RunResult run_subdivide(const Scenario& s) {
  EmbeddedMesh m = s.window ? window_mesh(s).first : load_lattice(s);
  m = subdivided(std::move(m), s.level);
  const MeshData data = to_mesh_data(m.triangulation, m.embedding);
  std::ostringstream mesh;
  write_mesh_text(mesh, data);
  RunResult out;
  const Triangulation& t = m.triangulation;
  out.summary = {{"level", s.level}, {"vertices", t.vertex_count()}, {"faces", t.face_count()},
                 {"edges", t.edge_count()}, {"mesh", "mesh.txt"}};
  out.table = csv_header(s) + "level,vertices,edges,faces\n" + std::to_string(s.level) + "," +
              std::to_string(t.vertex_count()) + "," + std::to_string(t.edge_count()) + "," +
              std::to_string(t.face_count()) + "\n";
  out.line = "subdivided " + std::to_string(s.level) + " times: " + std::to_string(t.vertex_count()) + " vertices, " +
             std::to_string(t.face_count()) + " faces";
  out.summary["mesh_text"] = mesh.str();
  return out;
}

struct TorusPacking {
  EmbeddedMesh mesh;
  RadiusSolution radii;
  CirclePacking packing;
};

TorusPacking pack_torus(const Scenario& s) {
  const EmbeddedMesh lattice = load_lattice(s);
  if (!lattice.triangulation.is_torus()) throw InvalidArgument("scenario: packing needs a periodic lattice");
  TorusPacking tp{refine(lattice.triangulation, lattice.embedding, s.N), {}, {}};
  tp.radii = solve_radii(torus_problem(tp.mesh.triangulation));
  tp.packing = layout(tp.mesh.triangulation, tp.radii.radii, &tp.mesh.embedding);
  return tp;
}

RunResult run_pack(const Scenario& s) {
  const TorusPacking tp = pack_torus(s);
  const CirclePacking& cp = tp.packing;
  RunResult out;
  out.summary = {{"N", s.N},
                 {"vertices", tp.mesh.triangulation.vertex_count()},
                 {"residual", tp.radii.residual},
                 {"sweeps", tp.radii.sweeps},
                 {"newton_steps", tp.radii.newton_steps},
                 {"closure_gap", cp.closure_gap},
                 {"tau", {cp.tau->real(), cp.tau->imag()}}};
  std::ostringstream os;
  os.precision(17);
  os << csv_header(s) << "vertex,radius,x,y\n";
  for (std::size_t v = 0; v < cp.radii.size(); ++v) {
    os << v << ',' << cp.radii[v] << ',' << cp.centers[v].real() << ',' << cp.centers[v].imag() << '\n';
  }
  out.table = os.str();
  SvgScene scene;
  scene.circles = packing_circles(cp);
  if (s.render_shade) scene.shaded = fundamental_domain(*cp.periods);
  out.figure = render_svg(scene);
  out.line = "packing of " + std::to_string(cp.radii.size()) + " circles, tau = " + fmt(cp.tau->real(), 10) + " + " +
             fmt(cp.tau->imag(), 10) + "i, residual " + fmt(tp.radii.residual, 3);
  return out;
}

RunResult run_render(const Scenario& s) {
  SvgScene scene;
  RunResult out;
  if (s.render_embedding == "packing") {
    const TorusPacking tp = pack_torus(s);
    scene.segments = packing_segments(tp.mesh.triangulation, tp.packing);
    if (s.render_circles) scene.circles = packing_circles(tp.packing);
    if (s.render_shade) scene.shaded = fundamental_domain(*tp.packing.periods);
    out.summary["tau"] = {tp.packing.tau->real(), tp.packing.tau->imag()};
  } else {
    EmbeddedMesh m;
    if (s.window) {
      m = window_mesh(s).first;
    } else {
      const EmbeddedMesh lattice = load_lattice(s);
      m = lattice.triangulation.is_torus() ? refine(lattice.triangulation, lattice.embedding, s.N) : lattice;
    }
    m = subdivided(std::move(m), s.level);
    scene.segments = mesh_segments(m.triangulation, m.embedding);
    if (s.render_shade && m.embedding.periods) scene.shaded = fundamental_domain(*m.embedding.periods);
  }
  out.figure = render_svg(scene);
  out.summary["edges"] = scene.segments.size();
  out.summary["circles"] = scene.circles.size();
  out.summary["embedding"] = s.render_embedding;
  std::ostringstream os;
  os.precision(17);
  os << csv_header(s) << "edge,x0,y0,x1,y1\n";
  for (std::size_t i = 0; i < scene.segments.size(); ++i) {
    const auto& g = scene.segments[i];
    os << i << ',' << g[0].real() << ',' << g[0].imag() << ',' << g[1].real() << ',' << g[1].imag() << '\n';
  }
  out.table = os.str();
  out.line = "rendered " + std::to_string(scene.segments.size()) + " edges and " + std::to_string(scene.circles.size()) +
             " circles";
  return out;
}

RunResult run_modulus(const Scenario& s) {
  const QuadDomain q = scenario_quad(s);
  const ModulusResult r = modulus(q.marked, s.level);
  RunResult out;
  out.summary = modulus_to_json(r);
  out.summary["cardy"] = cardy(r.rho);
  std::ostringstream os;
  os.precision(17);
  os << csv_header(s) << "level,rho\n";
  for (std::size_t n = 0; n < r.level_rho.size(); ++n) os << n << ',' << r.level_rho[n] << '\n';
  out.table = os.str();
  out.line = "rho_" + std::to_string(r.level) + " = " + fmt(r.rho, 12) +
             (std::isnan(r.error_estimate) ? "" : " (|rho_n - rho_n-1| = " + fmt(r.error_estimate, 3) + ")") +
             ", cardy " + fmt(cardy(r.rho), 12);
  return out;
}

RunResult run_crossing(const Scenario& s, bool compare) {
  const QuadDomain q = scenario_quad(s);
  MarkedRectangleDomain fine = q.marked;
  fine.triangulation = subdivide_times(q.marked.triangulation, s.level);
  const CrossingEstimate e = crossing_probability(fine.triangulation, crossing_spec(fine), s.trials, *s.seed, s.p);
  RunResult out;
  out.summary = crossing_to_json(e);
  out.summary["vertices"] = fine.triangulation.vertex_count();
  out.summary["level"] = s.level;
  std::ostringstream os;
  os.precision(17);
  os << csv_header(s) << "level,vertices,trials,successes,estimate,half_width";
  std::string line = "crossing " + fmt(e.estimate, 6) + " +/- " + fmt(e.half_width, 3) + " (95%, " +
                     std::to_string(e.trials) + " trials)";
  if (compare) {
    const ModulusResult r = modulus(q.marked, s.level);
    const std::optional<double> nominal = nominal_modulus(s);
    const double rho = nominal.value_or(r.rho);
    const double target = cardy(rho);
    out.summary["rho_discrete"] = r.rho;
    out.summary["rho_target"] = rho;
    out.summary["rho_source"] = nominal ? "shape" : "discrete";
    out.summary["target"] = target;
    out.summary["within_ci"] = std::abs(e.estimate - target) <= e.half_width;
    os << ",rho_discrete,rho_target,target";
    line += ", target " + fmt(target, 6) + " at rho " + fmt(rho, 6);
    os << '\n' << s.level << ',' << fine.triangulation.vertex_count() << ',' << e.trials << ',' << e.successes << ','
       << e.estimate << ',' << e.half_width << ',' << r.rho << ',' << rho << ',' << target << '\n';
  } else {
    os << '\n' << s.level << ',' << fine.triangulation.vertex_count() << ',' << e.trials << ',' << e.successes << ','
       << e.estimate << ',' << e.half_width << '\n';
  }
  out.table = os.str();
  out.line = line;
  return out;
}

MarkedTriangleDomain refined_triangle(const TriangleDomain& d, int level, EmbeddedMesh* mesh) {
  *mesh = subdivided(EmbeddedMesh{d.marked.triangulation, d.embedding}, level);
  return {mesh->triangulation, d.marked.a, d.marked.b, d.marked.c};
}

RunResult run_observable(const Scenario& s) {
  const TriangleDomain d = scenario_triangle(s);
  EmbeddedMesh mesh;
  const MarkedTriangleDomain fine = refined_triangle(d, s.level, &mesh);
  const Observables obs = estimate_observables(fine, s.trials, s.seed.value_or(0), s.p);
  RunResult out;
  out.summary = {{"trials", obs.H.trials}, {"faces", fine.triangulation.face_count()}, {"level", s.level},
                 {"exhaustive", s.trials == 0}};
  if (s.seed) out.summary["seed"] = *s.seed;
  out.table = csv_header(s) + observable_csv(obs.H);
  out.summary["edge_table"] = edge_csv(obs.P);
  out.line = "observable on " + std::to_string(fine.triangulation.face_count()) + " faces from " +
             std::to_string(obs.H.trials) + (s.trials == 0 ? " colourings" : " trials");
  return out;
}

RunResult run_contour(const Scenario& s) {
  const TriangleDomain d = scenario_triangle(s);
  EmbeddedMesh mesh;
  const MarkedTriangleDomain fine = refined_triangle(d, s.level, &mesh);
  const Triangulation& t = fine.triangulation;
  const std::vector<int> chain = contour_ring(t, mesh.embedding, s.contour_center, s.contour_radius);
  const ObservableField H = estimate_H(fine, s.trials, *s.seed, s.p);
  std::vector<Point> h(t.face_count()), phi(t.face_count());
  for (int f = 0; f < t.face_count(); ++f) {
    h[f] = H.H(f);
    const Face& fc = t.face(f);
    phi[f] = (mesh.embedding.positions[fc[0]] + mesh.embedding.positions[fc[1]] + mesh.embedding.positions[fc[2]]) / 3.0;
  }
  const Point I = contour_integral(t, h, phi, chain);
  RunResult out;
  out.summary = {{"I", {I.real(), I.imag()}}, {"abs_I", std::abs(I)}, {"chain_faces", chain.size() - 1},
                 {"trials", s.trials}, {"seed", *s.seed}, {"level", s.level}};
  std::ostringstream os;
  os.precision(17);
  os << csv_header(s) << "k,face,x,y,re_H,im_H\n";
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const int f = chain[k];
    os << k << ',' << f << ',' << phi[f].real() << ',' << phi[f].imag() << ',' << h[f].real() << ',' << h[f].imag()
       << '\n';
  }
  out.table = os.str();
  out.line = "contour sum over " + std::to_string(chain.size() - 1) + " faces: |I| = " + fmt(std::abs(I), 6);
  return out;
}

RunResult run_rsw(const Scenario& s) {
  const EmbeddedMesh lattice = load_lattice(s);
  RswConfig cfg;
  cfg.deltas = s.rsw_deltas;
  cfg.Ns = s.rsw_Ns;
  cfg.lambda = s.rsw_lambda;
  cfg.height = s.rsw_height;
  cfg.center = s.rsw_center;
  cfg.angles.clear();
  for (double a : s.rsw_angles_deg) cfg.angles.push_back(a * kPi / 180);
  cfg.trials = s.trials;
  cfg.seed = *s.seed;
  const std::vector<RswRow> rows = rsw_harness(lattice, cfg);
  RunResult out;
  out.summary["rows"] = nlohmann::json::array();
  double lo = 1, hi = 0, worst_hw = 0;
  for (const RswRow& r : rows) {
    nlohmann::json j = crossing_to_json(r.estimate);
    j["delta"] = r.delta;
    j["N"] = r.N;
    j["angle"] = r.angle;
    j["vertices"] = r.vertices;
    out.summary["rows"].push_back(j);
    lo = std::min(lo, r.estimate.estimate);
    hi = std::max(hi, r.estimate.estimate);
    worst_hw = std::max(worst_hw, r.estimate.half_width);
  }
  out.summary["min_estimate"] = lo;
  out.summary["max_estimate"] = hi;
  out.summary["max_half_width"] = worst_hw;
  out.table = csv_header(s) + rsw_csv(rows);
  out.line = "rsw lambda=" + fmt(s.rsw_lambda, 6) + ": estimates in [" + fmt(lo, 4) + ", " + fmt(hi, 4) +
             "], largest half-width " + fmt(worst_hw, 3);
  return out;
}

}  // namespace

std::string kind_name(Kind k) { return kKindNames[static_cast<int>(k)]; }

Kind parse_kind(const std::string& name) {
  if (name == "cardy-compare") return Kind::cardy;
  for (int i = 0; i < 10; ++i) {
    if (name == kKindNames[i]) return static_cast<Kind>(i);
  }
  throw InvalidArgument("unknown experiment kind '" + name + "'");
}

Scenario parse_scenario(const std::string& toml_text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(toml_text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << origin << ':' << e.source().begin.line << ':' << e.source().begin.column << ": " << e.description();
    throw ParseError(os.str());
  }
  reject_unknown(root, {"kind", "seed", "trials", "p", "out", "lattice", "domain", "contour", "rsw", "render"}, "scenario",
                 origin);
  Scenario s;
  if (auto n = root.get("kind")) {
    s.kind = parse_kind(text(*n, "kind", origin));
    s.kind_declared = true;
  }
  if (auto n = root.get("seed")) {
    const std::int64_t v = integer(*n, "seed", origin);
    if (v < 0) parse_fail(origin, "'seed' must be non-negative");
    s.seed = static_cast<std::uint64_t>(v);
  }
  if (auto n = root.get("trials")) s.trials = integer(*n, "trials", origin);
  if (auto n = root.get("p")) s.p = number(*n, "p", origin);
  if (auto n = root.get("out")) s.out = text(*n, "out", origin);

  auto section = [&](const char* name, const std::set<std::string>& keys) -> const toml::table* {
    const toml::node* n = root.get(name);
    if (!n) return nullptr;
    if (!n->is_table()) parse_fail(origin, std::string("'") + name + "' must be a table");
    reject_unknown(*n->as_table(), keys, std::string("[") + name + "]", origin);
    return n->as_table();
  };
  if (const toml::table* t = section("lattice", {"name", "file", "delta", "N", "window", "level"})) {
    if (auto n = t->get("name")) s.lattice_name = text(*n, "name", origin);
    if (auto n = t->get("file")) s.lattice_file = text(*n, "file", origin);
    if (auto n = t->get("delta")) s.delta = number(*n, "delta", origin);
    if (auto n = t->get("N")) s.N = static_cast<int>(integer(*n, "N", origin));
    if (auto n = t->get("level")) s.level = static_cast<int>(integer(*n, "level", origin));
    if (auto n = t->get("window")) {
      const std::vector<double> w = numbers(*n, "window", origin);
      if (w.size() != 4) parse_fail(origin, "'window' must be [x0, y0, x1, y1]");
      s.window = Rect{w[0], w[1], w[2], w[3]};
    }
  }
  if (const toml::table* t = section("domain", {"shape", "size", "rows", "cols", "marks"})) {
    if (auto n = t->get("shape")) s.shape = text(*n, "shape", origin);
    if (auto n = t->get("size")) s.size = static_cast<int>(integer(*n, "size", origin));
    if (auto n = t->get("rows")) s.rows = static_cast<int>(integer(*n, "rows", origin));
    if (auto n = t->get("cols")) s.cols = static_cast<int>(integer(*n, "cols", origin));
    if (auto n = t->get("marks")) {
      const toml::array* a = n->as_array();
      if (!a) parse_fail(origin, "'marks' must be an array of [x, y]");
      for (const toml::node& m : *a) s.marks.push_back(point(m, "marks", origin));
    }
  }
  if (const toml::table* t = section("contour", {"center", "radius"})) {
    if (auto n = t->get("center")) s.contour_center = point(*n, "center", origin);
    if (auto n = t->get("radius")) s.contour_radius = number(*n, "radius", origin);
  }
  if (const toml::table* t = section("rsw", {"deltas", "Ns", "lambda", "height", "center", "angles"})) {
    if (auto n = t->get("deltas")) s.rsw_deltas = numbers(*n, "deltas", origin);
    if (auto n = t->get("Ns")) {
      for (double x : numbers(*n, "Ns", origin)) s.rsw_Ns.push_back(static_cast<int>(x));
    }
    if (auto n = t->get("lambda")) s.rsw_lambda = number(*n, "lambda", origin);
    if (auto n = t->get("height")) s.rsw_height = number(*n, "height", origin);
    if (auto n = t->get("center")) s.rsw_center = point(*n, "center", origin);
    if (auto n = t->get("angles")) s.rsw_angles_deg = numbers(*n, "angles", origin);
  }
  if (const toml::table* t = section("render", {"embedding", "circles", "shade"})) {
    if (auto n = t->get("embedding")) s.render_embedding = text(*n, "embedding", origin);
    if (auto n = t->get("circles")) s.render_circles = boolean(*n, "circles", origin);
    if (auto n = t->get("shade")) s.render_shade = boolean(*n, "shade", origin);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open scenario file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  Scenario s = parse_scenario(os.str(), path);
  const std::filesystem::path file(s.lattice_file);
  if (!s.lattice_file.empty() && file.is_relative()) {
    s.lattice_file = (std::filesystem::path(path).parent_path() / file).lexically_normal().string();
  }
  return s;
}

std::string scenario_to_toml(const Scenario& s) {
  std::string t;
  t += "kind = " + quoted(kind_name(s.kind)) + "\n";
  if (s.seed) t += "seed = " + std::to_string(*s.seed) + "\n";
  t += "trials = " + std::to_string(s.trials) + "\n";
  t += "p = " + num17(s.p) + "\n";
  t += "out = " + quoted(s.out) + "\n";
  t += "\n[lattice]\n";
  if (!s.lattice_name.empty()) t += "name = " + quoted(s.lattice_name) + "\n";
  if (!s.lattice_file.empty()) t += "file = " + quoted(s.lattice_file) + "\n";
  t += "delta = " + num17(s.delta) + "\nN = " + std::to_string(s.N) + "\nlevel = " + std::to_string(s.level) + "\n";
  if (s.window) {
    t += "window = [" + num17(s.window->x0) + ", " + num17(s.window->y0) + ", " + num17(s.window->x1) + ", " +
         num17(s.window->y1) + "]\n";
  }
  t += "\n[domain]\nshape = " + quoted(s.shape) + "\nsize = " + std::to_string(s.size) +
       "\nrows = " + std::to_string(s.rows) + "\ncols = " + std::to_string(s.cols) + "\n";
  if (!s.marks.empty()) t += "marks = " + list_toml(s.marks, point_toml) + "\n";
  t += "\n[contour]\ncenter = " + point_toml(s.contour_center) + "\nradius = " + num17(s.contour_radius) + "\n";
  t += "\n[rsw]\ndeltas = " + list_toml(s.rsw_deltas, num17) +
       "\nNs = " + list_toml(s.rsw_Ns, [](int n) { return std::to_string(n); }) + "\nlambda = " + num17(s.rsw_lambda) +
       "\nheight = " + num17(s.rsw_height) + "\ncenter = " + point_toml(s.rsw_center) +
       "\nangles = " + list_toml(s.rsw_angles_deg, num17) + "\n";
  t += "\n[render]\nembedding = " + quoted(s.render_embedding) +
       "\ncircles = " + (s.render_circles ? "true" : "false") + "\nshade = " + (s.render_shade ? "true" : "false") + "\n";
  return t;
}

void check_scenario(const Scenario& s) {
  auto fail = [](const std::string& what) { throw InvalidArgument("scenario: " + what); };
  if (stochastic(s) && !s.seed) fail(kind_name(s.kind) + " needs a seed");
  if (stochastic(s) && s.trials <= 0) fail(kind_name(s.kind) + " needs trials > 0");
  if (s.kind == Kind::observable && s.trials < 0) fail("trials must be non-negative");
  if (!(s.p >= 0 && s.p <= 1)) fail("p must lie in [0, 1]");
  if (s.level < 0) fail("lattice.level must be non-negative");
  if (s.N < 1) fail("lattice.N must be at least 1");
  if (!(s.delta > 0)) fail("lattice.delta must be positive");
  if (s.window && !(s.window->x1 > s.window->x0 && s.window->y1 > s.window->y0)) fail("lattice.window is empty");
  if (!s.lattice_name.empty() && !s.lattice_file.empty()) fail("give lattice.name or lattice.file, not both");
  const bool shaped = s.shape == "rhombus" || s.shape == "rectangle" || s.shape == "triangle";
  if (s.shape != "window" && !shaped) fail("unknown domain.shape '" + s.shape + "'");
  if (shaped) {
    if (!s.lattice_file.empty() || (!s.lattice_name.empty() && s.lattice_name != "triangular")) {
      fail("domain.shape '" + s.shape + "' is cut from the triangular lattice");
    }
    if (s.shape == "rectangle" ? (s.rows < 1 || s.cols < 1) : s.size < 1) fail("domain size missing");
  } else if (s.lattice_name.empty() && s.lattice_file.empty()) {
    fail("lattice.name or lattice.file is required");
  }
  if (quad_kind(s.kind)) {
    if (s.shape == "triangle") fail(kind_name(s.kind) + " needs a four-mark domain");
    if (!s.marks.empty() && s.marks.size() != 4) fail(kind_name(s.kind) + " needs four marks");
  }
  if (triangle_kind(s.kind)) {
    if (s.shape == "rhombus" || s.shape == "rectangle") fail(kind_name(s.kind) + " needs a three-mark domain");
    if (!s.marks.empty() && s.marks.size() != 3) fail(kind_name(s.kind) + " needs three marks");
  }
  if (s.kind == Kind::contour && !(s.contour_radius > 0)) fail("contour.radius must be positive");
  if (s.kind == Kind::rsw) {
    if (s.rsw_deltas.empty() || s.rsw_deltas.size() != s.rsw_Ns.size()) fail("rsw.deltas and rsw.Ns must pair up");
    if (!(s.rsw_lambda > 1)) fail("rsw.lambda must exceed 1");
    if (s.rsw_angles_deg.empty()) fail("rsw.angles is empty");
  }
  if ((s.kind == Kind::pack || s.kind == Kind::rsw) && shaped) fail(kind_name(s.kind) + " needs a periodic lattice");
  if (s.kind == Kind::render && s.render_embedding != "source" && s.render_embedding != "packing") {
    fail("render.embedding must be 'source' or 'packing'");
  }
  if (s.kind == Kind::validate && shaped) fail("validate needs lattice.name or lattice.file");
}

QuadDomain scenario_quad(const Scenario& s) {
  if (s.shape == "rhombus") return triangular_rhombus(s.size);
  if (s.shape == "rectangle") return triangular_rectangle(s.rows, s.cols);
  if (s.shape != "window") throw InvalidArgument("scenario: shape '" + s.shape + "' has no four marks");
  auto [mesh, id_limit] = window_mesh(s);
  std::array<Point, 4> targets;
  if (s.marks.size() == 4) {
    std::copy(s.marks.begin(), s.marks.end(), targets.begin());
  } else if (s.window) {
    const Rect& w = *s.window;
    targets = {Point{w.x1, w.y0}, Point{w.x1, w.y1}, Point{w.x0, w.y1}, Point{w.x0, w.y0}};
  } else {
    throw InvalidArgument("scenario: domain.marks needed for a mesh without a window");
  }
  return mark_quad(std::move(mesh), targets, id_limit);
}

TriangleDomain scenario_triangle(const Scenario& s) {
  if (s.shape == "triangle") return triangular_triangle(s.size);
  if (s.shape != "window") throw InvalidArgument("scenario: shape '" + s.shape + "' has no three marks");
  auto [mesh, id_limit] = window_mesh(s);
  std::array<Point, 3> targets;
  if (s.marks.size() == 3) {
    std::copy(s.marks.begin(), s.marks.end(), targets.begin());
  } else if (s.window) {
    const Rect& w = *s.window;
    targets = {Point{w.x1, w.y0}, Point{(w.x0 + w.x1) / 2, w.y1}, Point{w.x0, w.y0}};
  } else {
    throw InvalidArgument("scenario: domain.marks needed for a mesh without a window");
  }
  return mark_triangle(std::move(mesh), targets, id_limit);
}

RunResult run(const Scenario& s) {
  check_scenario(s);
  RunResult r;
  switch (s.kind) {
    case Kind::validate: r = run_validate(s); break;
    case Kind::subdivide: r = run_subdivide(s); break;
    case Kind::pack: r = run_pack(s); break;
    case Kind::render: r = run_render(s); break;
    case Kind::modulus: r = run_modulus(s); break;
    case Kind::cardy: r = run_crossing(s, true); break;
    case Kind::crossing: r = run_crossing(s, false); break;
    case Kind::observable: r = run_observable(s); break;
    case Kind::contour: r = run_contour(s); break;
    case Kind::rsw: r = run_rsw(s); break;
  }
  r.summary["kind"] = kind_name(s.kind);
  r.summary["scenario"] = scenario_json(s);
  r.summary["line"] = r.line;
  return r;
}

void write_artifacts(const Scenario& s, const RunResult& r) {
  namespace fs = std::filesystem;
  const fs::path dir(s.out);
  fs::create_directories(dir);
  auto write = [&](const fs::path& name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + (dir / name).string());
    f << body;
  };
  nlohmann::json summary = r.summary;
  // Bulky text payloads go to their own files.
  if (summary.contains("mesh_text")) {
    write("mesh.txt", summary["mesh_text"].get<std::string>());
    summary.erase("mesh_text");
  }
  if (summary.contains("edge_table")) {
    write("edges.csv", csv_header(s) + summary["edge_table"].get<std::string>());
    summary["edge_table"] = "edges.csv";
  }
  write("summary.json", summary.dump(2) + "\n");
  write("table.csv", r.table);
  if (r.figure) write("figure.svg", *r.figure);
  write("scenario.toml", scenario_to_toml(s));
}

}  // namespace mesoperc
