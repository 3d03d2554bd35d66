#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "nodal/functional.hpp"
#include "oracles.hpp"

using namespace nodal;

namespace {

const double kPi = std::acos(-1.0);

DiscreteFunction sine_mode(const Mesh& mesh, int k) {
  const double lo = mesh.vertices.col(0).minCoeff();
  const double hi = mesh.vertices.col(0).maxCoeff();
  Eigen::VectorXd values(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v)
    values(v) = std::sin(k * kPi * (mesh.vertices(v, 0) - lo) / (hi - lo));
  return DiscreteFunction::from_values(mesh, values);
}

}  // namespace

TEST_SUITE("functional") {

TEST_CASE("hat function on the two-element interval") {
  // One interior vertex at 1/2 with value 1: |v'| = 2 on both halves, so
  // the gradient integrals are 4 and 2^p.
  const Mesh mesh = build_interval_mesh(2, 0.0, 1.0);
  const EnergyFunctional functional(mesh, Nonlinearity(3.0, 4.0, 0.0, 1.0));
  Eigen::VectorXd one(1);
  one << 1.0;
  const DiscreteFunction hat = DiscreteFunction::from_interior(mesh, one);

  const EnergyParts parts = functional.energy(1.0, hat);
  CHECK(parts.dirichlet2 == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(parts.dirichletp == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(parts.total(1.0, 3.0) ==
        doctest::Approx(2.0 + 8.0 / 3.0 - parts.potential).epsilon(1e-14));
}

TEST_CASE("boundary values are forced to zero") {
  const Mesh mesh = build_interval_mesh(4, 0.0, 1.0);
  const DiscreteFunction v =
      DiscreteFunction::from_values(mesh, Eigen::VectorXd::Ones(mesh.vertex_count()));
  CHECK(v.values()(0) == 0.0);
  CHECK(v.values()(4) == 0.0);
  CHECK(v.values()(2) == 1.0);
  CHECK(v.interior().size() == 3);
}

TEST_CASE("energy parts match a dense quadrature oracle") {
  const Mesh mesh = build_interval_mesh(64, 0.0, 1.0);
  std::mt19937_64 rng(23);

  // Pure power reaction: F(v) is a degree-4 polynomial per element, inside
  // the quadrature degree, so the oracle match is tight.
  const Nonlinearity pure(3.0, 4.0, 0.0, 1.0);
  const EnergyFunctional functional(mesh, pure);
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteFunction v = oracles::random_function(mesh, rng);
    const EnergyParts parts = functional.energy(0.3, v);
    const EnergyParts dense = oracles::dense_energy_parts(mesh, pure, v);
    CHECK(parts.dirichlet2 == doctest::Approx(dense.dirichlet2).epsilon(1e-10));
    CHECK(parts.dirichletp == doctest::Approx(dense.dirichletp).epsilon(1e-10));
    CHECK(parts.potential == doctest::Approx(dense.potential).epsilon(1e-6));
  }

  // With mu != 0 the integrand carries |v|^3 kinks on sign-crossing
  // elements; the fixed rule is then only approximate. Gradient terms stay
  // exact.
  const Nonlinearity mixed(3.0, 4.0, 1.0, 1.0);
  const EnergyFunctional mixed_functional(mesh, mixed);
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteFunction v = oracles::random_function(mesh, rng);
    const EnergyParts parts = mixed_functional.energy(0.3, v);
    const EnergyParts dense = oracles::dense_energy_parts(mesh, mixed, v);
    CHECK(parts.dirichletp == doctest::Approx(dense.dirichletp).epsilon(1e-10));
    CHECK(parts.potential == doctest::Approx(dense.potential).epsilon(5e-3));
  }
}

TEST_CASE("gradient integrals are p-homogeneous under scaling") {
  const Mesh mesh = build_interval_mesh(16, 0.0, 1.0);
  const EnergyFunctional functional(mesh, Nonlinearity(3.5, 4.5, 0.5, 1.0));
  std::mt19937_64 rng(29);
  const DiscreteFunction v = oracles::random_function(mesh, rng);
  const EnergyParts base = functional.energy(0.0, v);
  for (const double c : {2.0, 0.25, -3.0}) {
    const EnergyParts scaled = functional.energy(0.0, v.scaled(c));
    CHECK(scaled.dirichlet2 == doctest::Approx(c * c * base.dirichlet2).epsilon(1e-12));
    CHECK(scaled.dirichletp ==
          doctest::Approx(std::pow(std::abs(c), 3.5) * base.dirichletp).epsilon(1e-12));
  }
}

TEST_CASE("gradient agrees with finite differences") {
  std::mt19937_64 rng(31);
  const Nonlinearity nl(3.0, 4.0, 1.0, 1.0);

  const Mesh mesh1 = build_interval_mesh(24, 0.0, 1.0);
  const EnergyFunctional f1(mesh1, nl);
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteFunction v = oracles::random_function(mesh1, rng);
    const Eigen::VectorXd grad = f1.gradient(0.7, v);
    const Eigen::VectorXd fd = oracles::fd_gradient(f1, 0.7, v, 1e-6);
    CHECK((grad - fd).norm() <= 1e-6 * (1.0 + grad.norm()));
  }

  const Mesh mesh2 = build_rect_mesh(6, 6, 1.0, 1.0);
  const EnergyFunctional f2(mesh2, nl);
  for (int trial = 0; trial < 3; ++trial) {
    const DiscreteFunction v = oracles::random_function(mesh2, rng);
    const Eigen::VectorXd grad = f2.gradient(0.2, v);
    const Eigen::VectorXd fd = oracles::fd_gradient(f2, 0.2, v, 1e-6);
    CHECK((grad - fd).norm() <= 1e-6 * (1.0 + grad.norm()));
  }
}

TEST_CASE("Nehari defect equals the gradient paired with v") {
  const Mesh mesh = build_interval_mesh(20, 0.0, 1.0);
  const EnergyFunctional functional(mesh, Nonlinearity(3.0, 4.0, -0.5, 2.0));
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteFunction v = oracles::random_function(mesh, rng);
    const double defect = functional.nehari_defect(0.4, v);
    const double paired = functional.gradient(0.4, v).dot(v.interior());
    CHECK(defect == doctest::Approx(paired).epsilon(1e-12));
  }
}

TEST_CASE("Hessian is symmetric and matches directional differences") {
  std::mt19937_64 rng(41);
  const Nonlinearity nl(3.0, 4.0, 1.0, 1.0);
  for (const Mesh& mesh : {build_interval_mesh(16, 0.0, 1.0), build_rect_mesh(5, 5, 1.0, 1.0)}) {
    const EnergyFunctional functional(mesh, nl);
    for (int trial = 0; trial < 3; ++trial) {
      const DiscreteFunction v = oracles::random_function(mesh, rng);
      const Eigen::MatrixXd H = functional.hessian(0.5, v);
      CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + H.cwiseAbs().maxCoeff()));

      Eigen::VectorXd dir = Eigen::VectorXd::Zero(mesh.interior_count());
      for (Eigen::Index i = 0; i < dir.size(); ++i)
        dir(i) = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
      dir.normalize();
      const Eigen::VectorXd fd = oracles::fd_hessian_apply(functional, 0.5, v, dir, 1e-6);
      CHECK((H * dir - fd).norm() <= 1e-5 * (1.0 + (H * dir).norm()));
    }
  }
}

TEST_CASE("Hessian at zero reduces to the weighted Laplace stiffness") {
  // At v = 0 the p-Laplacian kernels vanish (p > 2) and f'(0) = 0, leaving
  // exactly eps^2 times the Laplace stiffness.
  const Mesh mesh = build_rect_mesh(4, 4, 1.0, 1.0);
  const EnergyFunctional functional(mesh, Nonlinearity(3.0, 4.0, 1.0, 1.0));
  const double eps = 0.3;
  const Eigen::MatrixXd H = functional.hessian(eps, DiscreteFunction(mesh));
  const Eigen::MatrixXd G = Eigen::MatrixXd(laplace_stiffness(mesh));
  CHECK((H - eps * eps * G).cwiseAbs().maxCoeff() <= 1e-14 * G.cwiseAbs().maxCoeff());
}

TEST_CASE("ray samples reproduce the section and its derivatives") {
  const Mesh mesh = build_interval_mesh(24, 0.0, 1.0);
  const Nonlinearity nl(3.0, 4.0, 1.0, 1.0);
  const EnergyFunctional functional(mesh, nl);
  std::mt19937_64 rng(43);
  const DiscreteFunction v = oracles::random_function(mesh, rng);
  const RaySamples ray = functional.ray_samples(v);
  const double eps = 0.25;

  for (const double t : {0.3, 1.0, 2.7}) {
    CHECK(ray.g(nl, eps, t) == doctest::Approx(functional.value(eps, v.scaled(t))).epsilon(1e-12));
    const double h = 1e-6;
    const double fd_dg = (ray.g(nl, eps, t + h) - ray.g(nl, eps, t - h)) / (2 * h);
    const double fd_d2g = (ray.dg(nl, eps, t + h) - ray.dg(nl, eps, t - h)) / (2 * h);
    CHECK(ray.dg(nl, eps, t) == doctest::Approx(fd_dg).epsilon(1e-6));
    CHECK(ray.d2g(nl, eps, t) == doctest::Approx(fd_d2g).epsilon(1e-6));
  }

  // dg(1) is the Nehari defect of v itself.
  CHECK(ray.dg(nl, eps, 1.0) == doctest::Approx(functional.nehari_defect(eps, v)).epsilon(1e-11));
}

TEST_CASE("lp integral is exact for squares") {
  // |v|^2 of a piecewise-linear function is quadratic per element, well
  // inside the quadrature degree; compare with the mass-matrix value.
  const Mesh mesh = build_interval_mesh(12, 0.0, 2.0);
  const EnergyFunctional functional(mesh, Nonlinearity(3.0, 4.0, 0.0, 1.0));
  std::mt19937_64 rng(47);
  const DiscreteFunction v = oracles::random_function(mesh, rng);
  double exact = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double h = mesh.element_volume(e);
    const double a = v.values()(mesh.elements(e, 0));
    const double b = v.values()(mesh.elements(e, 1));
    exact += h / 3.0 * (a * a + a * b + b * b);
  }
  CHECK(functional.lp_integral(v, 2.0) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("functions from another mesh are rejected") {
  const Mesh mesh_a = build_interval_mesh(8, 0.0, 1.0);
  const Mesh mesh_b = build_interval_mesh(8, 0.0, 1.0);
  const EnergyFunctional functional(mesh_a, Nonlinearity(3.0, 4.0, 0.0, 1.0));
  const DiscreteFunction v(mesh_b);
  CHECK_THROWS_AS(functional.value(0.1, v), InvalidArgument);
  CHECK_THROWS_AS(functional.gradient(0.1, v), InvalidArgument);
  CHECK_THROWS_AS(functional.hessian(0.1, v), InvalidArgument);
}

TEST_CASE("hessian coordinate text round trips") {
  Eigen::MatrixXd H(2, 2);
  H << 1.0 / 3.0, -2.0e-17, -2.0e-17, 5.0;
  const std::string text = hessian_coordinate_text(H);
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(2, 2);
  std::istringstream in(text);
  int r, c;
  double x;
  while (in >> r >> c >> x) back(r, c) = x;
  CHECK(back == H);  // bit-exact round trip
}

// Regularized flux ---------------------------------------------------------

TEST_CASE("diffusion jacobian spectrum in closed form") {
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd eigs0 = diffusion_jacobian_eigs(3.0, 0.5, z0);
  CHECK(eigs0(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(eigs0(1) == doctest::Approx(0.25).epsilon(1e-15));

  // p = 4, eps = 0, z = (1, 0): eigenvalues 1 and p - 1 = 3.
  Eigen::VectorXd e1(2);
  e1 << 1.0, 0.0;
  const Eigen::VectorXd eigs1 = diffusion_jacobian_eigs(4.0, 0.0, e1);
  CHECK(eigs1(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eigs1(1) == doctest::Approx(3.0).epsilon(1e-15));

  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double p = 2.5 + 2.0 * std::abs(dist(rng));
    const double eps = std::abs(dist(rng));
    const int dim = (trial % 2) + 1;
    Eigen::VectorXd z(dim);
    for (int i = 0; i < dim; ++i) z(i) = dist(rng);

    const Eigen::MatrixXd DA = diffusion_jacobian(p, eps, z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(DA);
    const Eigen::VectorXd closed = diffusion_jacobian_eigs(p, eps, z);
    REQUIRE(closed.size() == dim);
    for (int i = 0; i < dim; ++i)
      CHECK(closed(i) == doctest::Approx(solver.eigenvalues()(i)).epsilon(1e-12));
  }
}

TEST_CASE("diffusion jacobian differentiates the flux") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = 3.0 + std::abs(dist(rng));
    const double eps = 0.2 + std::abs(dist(rng));
    Eigen::VectorXd z(2);
    z << dist(rng) + 0.5, dist(rng) - 0.5;
    if (z.norm() < 0.1) continue;
    const Eigen::MatrixXd DA = diffusion_jacobian(p, eps, z);
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd zp = z, zm = z;
      zp(j) += h;
      zm(j) -= h;
      const Eigen::VectorXd fd =
          (diffusion_flux(p, eps, zp) - diffusion_flux(p, eps, zm)) / (2 * h);
      CHECK((DA.col(j) - fd).norm() <= 1e-6 * (1.0 + DA.col(j).norm()));
    }
  }
}

TEST_CASE("ellipticity sandwich holds for random data") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double p = 2.2 + 2.5 * std::abs(dist(rng)) / 3.0;
    const double eps = 0.01 + std::abs(dist(rng));
    const int dim = (trial % 2) + 1;
    Eigen::VectorXd z(dim), zeta(dim);
    for (int i = 0; i < dim; ++i) {
      z(i) = dist(rng);
      zeta(i) = dist(rng);
    }
    CHECK(ellipticity_bounds_check(p, eps, z, zeta));
  }
}

// First eigenvalue ---------------------------------------------------------

TEST_CASE("lambda_1 for p = 2 on the unit interval") {
  const Mesh mesh = build_interval_mesh(256, 0.0, 1.0);
  const SpectralEstimate est = lambda_1p(mesh, 2.0);
  CHECK(std::abs(est.lambda - kPi * kPi) <= 0.005 * kPi * kPi);
  // Against an independent dense generalized eigensolver on the same mesh.
  const double dense = oracles::lambda1_dense_oracle(mesh);
  CHECK(std::abs(est.lambda - dense) <= 1e-3 * dense);
  CHECK(est.minimizer.values().maxCoeff() > 0.0);
}

TEST_CASE("lambda_1 for p = 2 on the unit square") {
  const Mesh mesh = build_rect_mesh(24, 24, 1.0, 1.0);
  const SpectralEstimate est = lambda_1p(mesh, 2.0);
  CHECK(std::abs(est.lambda - 2.0 * kPi * kPi) <= 0.01 * 2.0 * kPi * kPi);
}

TEST_CASE("lambda_1 scaling in the interval length") {
  // Dilating (0,1) to (0,L) scales the Rayleigh quotient by L^{-p}.
  const double p = 3.0;
  const SpectralEstimate unit = lambda_1p(build_interval_mesh(128, 0.0, 1.0), p);
  const SpectralEstimate wide = lambda_1p(build_interval_mesh(128, 0.0, 2.0), p);
  CHECK(std::abs(wide.lambda - unit.lambda * std::pow(0.5, p)) <= 0.01 * wide.lambda);
}

TEST_CASE("lambda_1 rejects invalid inputs") {
  const Mesh mesh = build_interval_mesh(8, 0.0, 1.0);
  CHECK_THROWS_AS(lambda_1p(mesh, 1.5), InvalidArgument);
}

}  // TEST_SUITE
