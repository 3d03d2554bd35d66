#include "nodal/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <utility>

#include <Eigen/Dense>
#include <json.hpp>

#include "nodal/errors.hpp"

namespace nodal {

namespace {

// Fills volumes, gradient operators and interior numbering from the raw
// vertex/element/boundary data. Shared by the builders and JSON loading.
void finalize(Mesh& mesh) {
  const int ne = mesh.element_count();
  const int nv = mesh.vertex_count();
  const int nloc = mesh.dim + 1;
  if (mesh.elements.cols() != nloc)
    throw InvalidArgument("mesh elements must have dim+1 vertices each");
  if (static_cast<int>(mesh.boundary.size()) != nv)
    throw InvalidArgument("mesh boundary marker size mismatch");

  mesh.element_volume.resize(ne);
  mesh.grad_op.assign(ne, Eigen::MatrixXd::Zero(mesh.dim, nloc));

  // Local difference operator: row k holds d/d(barycentric direction k).
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(mesh.dim, nloc);
  for (int d = 0; d < mesh.dim; ++d) {
    diff(d, 0) = -1.0;
    diff(d, d + 1) = 1.0;
  }

  for (int e = 0; e < ne; ++e) {
    Eigen::MatrixXd edge(mesh.dim, mesh.dim);  // columns P_k - P_0
    for (int d = 0; d < mesh.dim; ++d)
      edge.col(d) = (mesh.vertices.row(mesh.elements(e, d + 1)) -
                     mesh.vertices.row(mesh.elements(e, 0)))
                        .transpose();
    const double det = edge.determinant();
    const double vol = std::abs(det) / (mesh.dim == 1 ? 1.0 : 2.0);
    if (!(vol > 0.0)) throw InvalidArgument("degenerate mesh element");
    mesh.element_volume(e) = vol;
    // grad = edge^{-T} * diff applied to local vertex values.
    mesh.grad_op[e] = edge.transpose().colPivHouseholderQr().solve(diff);
  }

  mesh.interior_index.assign(nv, -1);
  mesh.interior_vertices.clear();
  for (int v = 0; v < nv; ++v) {
    if (mesh.boundary[v]) continue;
    mesh.interior_index[v] = static_cast<int>(mesh.interior_vertices.size());
    mesh.interior_vertices.push_back(v);
  }
}

}  // namespace

Mesh build_interval_mesh(int n, double a, double b) {
  if (n < 2) throw InvalidArgument("interval mesh needs n >= 2");
  if (!(a < b)) throw InvalidArgument("interval mesh needs a < b");

  Mesh mesh;
  mesh.dim = 1;
  mesh.vertices.resize(n + 1, 1);
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) mesh.vertices(i, 0) = a + i * h;
  mesh.vertices(n, 0) = b;

  mesh.elements.resize(n, 2);
  for (int e = 0; e < n; ++e) {
    mesh.elements(e, 0) = e;
    mesh.elements(e, 1) = e + 1;
  }
  mesh.boundary.assign(n + 1, false);
  mesh.boundary[0] = mesh.boundary[n] = true;

  finalize(mesh);
  return mesh;
}

Mesh build_rect_mesh(int nx, int ny, double width, double height) {
  if (nx < 2 || ny < 2) throw InvalidArgument("rect mesh needs nx, ny >= 2");
  if (!(width > 0.0) || !(height > 0.0))
    throw InvalidArgument("rect mesh needs positive extents");

  Mesh mesh;
  mesh.dim = 2;
  const int nvx = nx + 1, nvy = ny + 1;
  mesh.vertices.resize(nvx * nvy, 2);
  mesh.boundary.assign(nvx * nvy, false);
  const double hx = width / nx, hy = height / ny;
  auto vid = [nvx](int i, int j) { return j * nvx + i; };
  for (int j = 0; j < nvy; ++j)
    for (int i = 0; i < nvx; ++i) {
      mesh.vertices(vid(i, j), 0) = i * hx;
      mesh.vertices(vid(i, j), 1) = j * hy;
      if (i == 0 || i == nx || j == 0 || j == ny) mesh.boundary[vid(i, j)] = true;
    }

  // Each cell is cut along the lower-left to upper-right diagonal.
  mesh.elements.resize(2 * nx * ny, 3);
  int e = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.elements.row(e++) << v00, v10, v11;
      mesh.elements.row(e++) << v00, v11, v01;
    }

  finalize(mesh);
  return mesh;
}

AdjacencyGraph vertex_adjacency(const Mesh& mesh) {
  std::vector<std::set<int>> nbr(mesh.vertex_count());
  for (int e = 0; e < mesh.element_count(); ++e)
    for (int i = 0; i <= mesh.dim; ++i)
      for (int j = 0; j <= mesh.dim; ++j) {
        if (i == j) continue;
        nbr[mesh.elements(e, i)].insert(mesh.elements(e, j));
      }
  AdjacencyGraph graph;
  graph.neighbors.reserve(nbr.size());
  for (auto& s : nbr) graph.neighbors.emplace_back(s.begin(), s.end());
  return graph;
}

bool AdjacencyGraph::is_connected() const {
  if (neighbors.empty()) return true;
  std::vector<bool> seen(neighbors.size(), false);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!todo.empty()) {
    const int v = todo.front();
    todo.pop();
    for (int w : neighbors[v])
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        todo.push(w);
      }
  }
  return count == neighbors.size();
}

std::string Mesh::to_json_string() const {
  nlohmann::ordered_json j;
  j["dim"] = dim;
  auto verts = nlohmann::ordered_json::array();
  for (int v = 0; v < vertex_count(); ++v) {
    auto row = nlohmann::ordered_json::array();
    for (int d = 0; d < dim; ++d) row.push_back(vertices(v, d));
    verts.push_back(std::move(row));
  }
  j["vertices"] = std::move(verts);
  auto elems = nlohmann::ordered_json::array();
  for (int e = 0; e < element_count(); ++e) {
    auto row = nlohmann::ordered_json::array();
    for (int k = 0; k <= dim; ++k) row.push_back(elements(e, k));
    elems.push_back(std::move(row));
  }
  j["elements"] = std::move(elems);
  j["boundary"] = boundary;
  return j.dump();
}

Mesh Mesh::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("mesh JSON parse error: ") + e.what());
  }
  Mesh mesh;
  try {
    mesh.dim = j.at("dim").get<int>();
    if (mesh.dim != 1 && mesh.dim != 2) throw InvalidArgument("mesh dim must be 1 or 2");
    const auto& verts = j.at("vertices");
    mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), mesh.dim);
    for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v)
      for (int d = 0; d < mesh.dim; ++d) mesh.vertices(v, d) = verts.at(v).at(d).get<double>();
    const auto& elems = j.at("elements");
    mesh.elements.resize(static_cast<Eigen::Index>(elems.size()), mesh.dim + 1);
    for (Eigen::Index e = 0; e < mesh.elements.rows(); ++e)
      for (int k = 0; k <= mesh.dim; ++k) mesh.elements(e, k) = elems.at(e).at(k).get<int>();
    mesh.boundary = j.at("boundary").get<std::vector<bool>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("mesh JSON structure error: ") + e.what());
  }
  finalize(mesh);
  return mesh;
}

}  // namespace nodal
