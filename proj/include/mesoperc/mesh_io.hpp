#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mesoperc/embedding.hpp"
#include "mesoperc/triangulation.hpp"

namespace mesoperc {

/// Unchecked mesh as read from a file.
struct MeshData {
  MeshConnectivity connectivity;
  std::vector<Point> positions;
  std::optional<Periods> periods;
};

/// Text format: `v <id> <x> <y>`, `f <a> <b> <c>`, `boundary <ids...>`,
/// `periods <x1> <y1> <x2> <y2>`; `#` starts a comment. A `periods` line makes
/// the mesh a torus. Vertex ids must be 0..V-1.
MeshData read_mesh_text(std::istream& in);
void write_mesh_text(std::ostream& out, const MeshData& m);

nlohmann::json mesh_to_json(const MeshData& m);
MeshData mesh_from_json(const nlohmann::json& j);

/// Dispatches on the `.json` extension.
MeshData load_mesh_file(const std::string& path);
void save_mesh_file(const std::string& path, const MeshData& m);

MeshData to_mesh_data(const Triangulation& t, const Embedding& e);

/// Combinatorial and geometric report for an unchecked mesh.
ValidationReport validate(const MeshData& m);

/// Throws InvalidTriangulation with the full report unless valid.
EmbeddedMesh build_embedded(const MeshData& m);

}  // namespace mesoperc
