#include "mesoperc/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mesoperc/error.hpp"

namespace mesoperc {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError("mesh line " + std::to_string(line) + ": " + msg);
}

}  // namespace

MeshData read_mesh_text(std::istream& in) {
  MeshData m;
  std::vector<std::optional<Point>> pos;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      long id;
      double x, y;
      if (!(ls >> id >> x >> y)) fail(lineno, "expected `v <id> <x> <y>`");
      if (id < 0 || id > 100000000) fail(lineno, "vertex id out of range");
      if (static_cast<std::size_t>(id) >= pos.size()) pos.resize(id + 1);
      if (pos[id]) fail(lineno, "duplicate vertex id " + std::to_string(id));
      pos[id] = Point{x, y};
    } else if (tag == "f") {
      Face f;
      if (!(ls >> f[0] >> f[1] >> f[2])) fail(lineno, "expected `f <a> <b> <c>`");
      m.connectivity.faces.push_back(f);
    } else if (tag == "boundary") {
      std::vector<int> b;
      int v;
      while (ls >> v) b.push_back(v);
      if (!ls.eof()) fail(lineno, "boundary ids must be integers");
      m.connectivity.boundary = std::move(b);
    } else if (tag == "periods") {
      double x1, y1, x2, y2;
      if (!(ls >> x1 >> y1 >> x2 >> y2)) fail(lineno, "expected `periods <x1> <y1> <x2> <y2>`");
      m.periods = Periods{Point{x1, y1}, Point{x2, y2}};
    } else {
      fail(lineno, "unknown record `" + tag + "`");
    }
    std::string extra;
    if (tag != "boundary" && (ls >> extra)) fail(lineno, "trailing text `" + extra + "`");
  }
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (!pos[i]) throw ParseError("vertex ids are not contiguous: missing " + std::to_string(i));
    m.positions.push_back(*pos[i]);
  }
  m.connectivity.vertex_count = static_cast<int>(m.positions.size());
  m.connectivity.topology = m.periods ? Topology::torus : Topology::disk;
  return m;
}

void write_mesh_text(std::ostream& out, const MeshData& m) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  if (m.periods) {
    out << "periods " << (*m.periods)[0].real() << ' ' << (*m.periods)[0].imag() << ' ' << (*m.periods)[1].real()
        << ' ' << (*m.periods)[1].imag() << '\n';
  }
  for (std::size_t i = 0; i < m.positions.size(); ++i) {
    out << "v " << i << ' ' << m.positions[i].real() << ' ' << m.positions[i].imag() << '\n';
  }
  for (const Face& f : m.connectivity.faces) out << "f " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  if (m.connectivity.boundary) {
    out << "boundary";
    for (int v : *m.connectivity.boundary) out << ' ' << v;
    out << '\n';
  }
}

nlohmann::json mesh_to_json(const MeshData& m) {
  nlohmann::json j;
  j["topology"] = m.connectivity.topology == Topology::torus ? "torus" : "disk";
  auto& vs = j["vertices"] = nlohmann::json::array();
  for (Point p : m.positions) vs.push_back({p.real(), p.imag()});
  auto& fs = j["faces"] = nlohmann::json::array();
  for (const Face& f : m.connectivity.faces) fs.push_back({f[0], f[1], f[2]});
  if (m.connectivity.boundary) j["boundary"] = *m.connectivity.boundary;
  if (m.periods) {
    j["periods"] = {{(*m.periods)[0].real(), (*m.periods)[0].imag()}, {(*m.periods)[1].real(), (*m.periods)[1].imag()}};
  }
  return j;
}

MeshData mesh_from_json(const nlohmann::json& j) {
  try {
    MeshData m;
    for (const auto& v : j.at("vertices")) m.positions.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    for (const auto& f : j.at("faces")) m.connectivity.faces.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
    if (j.contains("boundary")) m.connectivity.boundary = j["boundary"].get<std::vector<int>>();
    if (j.contains("periods")) {
      const auto& p = j["periods"];
      m.periods = Periods{Point{p.at(0).at(0).get<double>(), p.at(0).at(1).get<double>()},
                          Point{p.at(1).at(0).get<double>(), p.at(1).at(1).get<double>()}};
    }
    const std::string topo = j.value("topology", m.periods ? "torus" : "disk");
    if (topo != "torus" && topo != "disk") throw ParseError("unknown topology `" + topo + "`");
    m.connectivity.topology = topo == "torus" ? Topology::torus : Topology::disk;
    m.connectivity.vertex_count = static_cast<int>(m.positions.size());
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("mesh JSON: ") + ex.what());
  }
}

MeshData load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(path + ": " + ex.what());
    }
    return mesh_from_json(j);
  }
  return read_mesh_text(in);
}

void save_mesh_file(const std::string& path, const MeshData& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    out << mesh_to_json(m).dump(1) << '\n';
  } else {
    write_mesh_text(out, m);
  }
}

MeshData to_mesh_data(const Triangulation& t, const Embedding& e) {
  MeshData m;
  m.connectivity = t.connectivity();
  m.positions = e.positions;
  m.periods = e.periods;
  return m;
}

ValidationReport validate(const MeshData& m) {
  ValidationReport r = validate_connectivity(m.connectivity);
  if (m.connectivity.topology == Topology::torus && !m.periods) r.violations.push_back("torus mesh has no periods");
  if (!r.ok()) return r;
  if (m.periods && cross((*m.periods)[0], (*m.periods)[1]) <= 0.0) {
    r.violations.push_back("periods are degenerate or negatively oriented");
    return r;
  }
  const Triangulation t = Triangulation::build(m.connectivity);
  const Embedding e = make_embedding(t, m.positions, m.periods);
  return validate(t, e);
}

EmbeddedMesh build_embedded(const MeshData& m) {
  const ValidationReport r = validate(m);
  if (!r.ok()) {
    std::string msg = "invalid mesh:";
    for (const auto& v : r.violations) msg += "\n  " + v;
    throw InvalidTriangulation(msg);
  }
  EmbeddedMesh out;
  out.triangulation = Triangulation::build(m.connectivity);
  out.embedding = make_embedding(out.triangulation, m.positions, m.periods);
  return out;
}

}  // namespace mesoperc
