#include <doctest.h>

#include <random>
#include <set>

#include "nodal/mesh.hpp"
#include "nodal/errors.hpp"

using namespace nodal;

TEST_SUITE("mesh") {

TEST_CASE("interval mesh basics") {
  const Mesh mesh = build_interval_mesh(4, 0.0, 1.0);
  CHECK(mesh.dim == 1);
  CHECK(mesh.vertex_count() == 5);
  CHECK(mesh.element_count() == 4);
  CHECK(mesh.interior_count() == 3);
  CHECK(mesh.boundary[0]);
  CHECK(mesh.boundary[4]);
  CHECK(!mesh.boundary[2]);
  for (int e = 0; e < 4; ++e) CHECK(mesh.element_volume(e) == doctest::Approx(0.25));
  CHECK(mesh.measure() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rect mesh basics") {
  const Mesh mesh = build_rect_mesh(2, 2, 1.0, 1.0);
  CHECK(mesh.dim == 2);
  CHECK(mesh.vertex_count() == 9);
  CHECK(mesh.element_count() == 8);
  CHECK(mesh.interior_count() == 1);  // only the center vertex
  for (int e = 0; e < 8; ++e) CHECK(mesh.element_volume(e) == doctest::Approx(0.125));
  CHECK(mesh.measure() == doctest::Approx(1.0).epsilon(1e-12));

  // Boundary is exactly the rectangle edge vertices.
  int boundary_count = 0;
  for (bool b : mesh.boundary) boundary_count += b;
  CHECK(boundary_count == 8);
}

TEST_CASE("volume sums match the domain measure") {
  CHECK(build_interval_mesh(7, -2.5, 0.75).measure() == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(build_rect_mesh(3, 5, 2.0, 0.5).measure() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gradient operators reproduce affine gradients exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);

  for (int trial = 0; trial < 10; ++trial) {
    const Mesh mesh1 = build_interval_mesh(9, -1.0, 2.0);
    const double a1 = dist(rng), c1 = dist(rng);
    for (int e = 0; e < mesh1.element_count(); ++e) {
      Eigen::VectorXd local(2);
      for (int i = 0; i < 2; ++i) local(i) = a1 * mesh1.vertices(mesh1.elements(e, i), 0) + c1;
      const Eigen::VectorXd g = mesh1.grad_op[e] * local;
      CHECK(g(0) == doctest::Approx(a1).epsilon(1e-12));
    }

    const Mesh mesh2 = build_rect_mesh(3, 4, 1.5, 2.5);
    const double ax = dist(rng), ay = dist(rng), c2 = dist(rng);
    for (int e = 0; e < mesh2.element_count(); ++e) {
      Eigen::VectorXd local(3);
      for (int i = 0; i < 3; ++i)
        local(i) = ax * mesh2.vertices(mesh2.elements(e, i), 0) +
                   ay * mesh2.vertices(mesh2.elements(e, i), 1) + c2;
      const Eigen::VectorXd g = mesh2.grad_op[e] * local;
      CHECK(g(0) == doctest::Approx(ax).epsilon(1e-12));
      CHECK(g(1) == doctest::Approx(ay).epsilon(1e-12));
    }
  }
}

TEST_CASE("interval adjacency is the path graph") {
  const Mesh mesh = build_interval_mesh(5, 0.0, 1.0);
  const AdjacencyGraph graph = vertex_adjacency(mesh);
  REQUIRE(graph.neighbors.size() == 6);
  CHECK(graph.neighbors[0] == std::vector<int>{1});
  CHECK(graph.neighbors[3] == std::vector<int>{2, 4});
  CHECK(graph.neighbors[5] == std::vector<int>{4});
}

TEST_CASE("adjacency is symmetric and connected") {
  for (const Mesh& mesh : {build_interval_mesh(8, 0.0, 1.0), build_rect_mesh(3, 3, 1.0, 1.0)}) {
    const AdjacencyGraph graph = vertex_adjacency(mesh);
    CHECK(graph.is_connected());
    for (int v = 0; v < mesh.vertex_count(); ++v)
      for (int w : graph.neighbors[v]) {
        const auto& back = graph.neighbors[w];
        CHECK(std::find(back.begin(), back.end(), v) != back.end());
      }
  }
}

TEST_CASE("invalid construction arguments throw") {
  CHECK_THROWS_AS(build_interval_mesh(1, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_interval_mesh(8, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_interval_mesh(8, 2.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_rect_mesh(1, 4, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_rect_mesh(4, 4, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_rect_mesh(4, 4, 1.0, -2.0), InvalidArgument);
}

TEST_CASE("JSON round trip preserves the mesh") {
  for (const Mesh& mesh : {build_interval_mesh(6, -1.0, 3.0), build_rect_mesh(3, 2, 2.0, 1.0)}) {
    const Mesh copy = Mesh::from_json_string(mesh.to_json_string());
    CHECK(copy.dim == mesh.dim);
    CHECK(copy.vertices.isApprox(mesh.vertices));
    CHECK(copy.elements == mesh.elements);
    CHECK(copy.boundary == mesh.boundary);
    CHECK(copy.element_volume.isApprox(mesh.element_volume));
    CHECK(copy.interior_vertices == mesh.interior_vertices);
  }
}

TEST_CASE("malformed JSON is rejected") {
  CHECK_THROWS_AS(Mesh::from_json_string("not json"), InvalidArgument);
  CHECK_THROWS_AS(Mesh::from_json_string("{\"dim\":3}"), InvalidArgument);
  // degenerate element: repeated vertex
  CHECK_THROWS_AS(Mesh::from_json_string(
                      R"({"dim":1,"vertices":[[0.0],[1.0]],"elements":[[0,0]],"boundary":[true,true]})"),
                  InvalidArgument);
}

}  // TEST_SUITE
