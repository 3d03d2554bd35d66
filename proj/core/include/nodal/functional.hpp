#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <string>

#include "nodal/errors.hpp"
#include "nodal/mesh.hpp"
#include "nodal/nonlinearity.hpp"

namespace nodal {

/// Piecewise-linear trial function with zero boundary trace. Coefficients
/// are stored for every vertex; boundary entries are identically zero, so
/// the function always lies in the discrete zero-trace space. The mesh is
/// borrowed and must outlive the function.
class DiscreteFunction {
public:
  explicit DiscreteFunction(const Mesh& mesh)
      : mesh_(&mesh), values_(Eigen::VectorXd::Zero(mesh.vertex_count())) {}

  /// Nodal values for every vertex; boundary entries are forced to zero.
  static DiscreteFunction from_values(const Mesh& mesh, Eigen::VectorXd values);

  /// Values for interior vertices only, boundary implied zero.
  static DiscreteFunction from_interior(const Mesh& mesh, const Eigen::VectorXd& interior);

  const Mesh& mesh() const { return *mesh_; }
  const Eigen::VectorXd& values() const { return values_; }

  Eigen::VectorXd interior() const;
  DiscreteFunction scaled(double c) const;
  double max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }
  bool is_zero() const { return values_.isZero(0.0); }

private:
  const Mesh* mesh_;
  Eigen::VectorXd values_;
};

/// The three integrals making up the energy
///   J_eps(v) = eps^2/2 * dirichlet2 + dirichletp / p - potential.
struct EnergyParts {
  double dirichlet2 = 0;  ///< integral of |grad v|^2
  double dirichletp = 0;  ///< integral of |grad v|^p
  double potential = 0;   ///< integral of F(v)

  double total(double eps, double p) const {
    return 0.5 * eps * eps * dirichlet2 + dirichletp / p - potential;
  }
};

/// Data of the one-dimensional section g(t) = J_eps(t v) along a ray:
/// the two gradient integrals plus quadrature samples of v, enough to
/// evaluate g, g' and g'' for any t at O(#samples) cost.
struct RaySamples {
  double p = 0;
  double dirichlet2 = 0;
  double dirichletp = 0;
  Eigen::VectorXd values;   ///< v at quadrature points
  Eigen::VectorXd weights;  ///< quadrature weight times element volume

  double g(const Nonlinearity& nl, double eps, double t) const;
  double dg(const Nonlinearity& nl, double eps, double t) const;
  double d2g(const Nonlinearity& nl, double eps, double t) const;
};

/// Assembly of J_eps, its gradient, the Nehari defect gamma_eps and the
/// Hessian for one mesh/nonlinearity pair. Gradient integrals are exact
/// for piecewise-linear functions; reaction integrals use a fixed
/// three-point rule per element (Gauss in 1-D, interior barycentric
/// points in 2-D).
class EnergyFunctional {
public:
  EnergyFunctional(const Mesh& mesh, Nonlinearity nl);

  const Mesh& mesh() const { return *mesh_; }
  const Nonlinearity& nonlinearity() const { return nl_; }

  EnergyParts energy(double eps, const DiscreteFunction& v) const;
  double value(double eps, const DiscreteFunction& v) const {
    return energy(eps, v).total(eps, nl_.p);
  }

  /// Gradient covector over interior vertices: DJ_eps(v) phi_i.
  Eigen::VectorXd gradient(double eps, const DiscreteFunction& v) const;

  /// Nehari defect gamma_eps(v) = DJ_eps(v) v.
  double nehari_defect(double eps, const DiscreteFunction& v) const;

  /// Symmetric Hessian over interior vertices. On elements where the
  /// iterate is flat the p-Laplacian kernels vanish (p > 2), leaving the
  /// eps^2 and reaction blocks.
  Eigen::MatrixXd hessian(double eps, const DiscreteFunction& v) const;

  RaySamples ray_samples(const DiscreteFunction& v) const;

  /// Integral of |v|^r by the element quadrature rule.
  double lp_integral(const DiscreteFunction& v, double r) const;

private:
  void check_mesh(const DiscreteFunction& v) const;

  const Mesh* mesh_;
  Nonlinearity nl_;
  Eigen::MatrixXd quad_basis_;  ///< n_qp x (dim+1) basis values at quadrature points
  Eigen::VectorXd quad_w_;      ///< n_qp reference weights, summing to 1
};

/// Dense symmetric matrix as "row col value" lines, one per structural
/// nonzero, with round-trip precision.
std::string hessian_coordinate_text(const Eigen::MatrixXd& H);

/// Stiffness matrix of the Dirichlet Laplacian over interior vertices.
Eigen::SparseMatrix<double> laplace_stiffness(const Mesh& mesh);

// First p-Laplacian eigenvalue ------------------------------------------

struct SpectralOptions {
  int max_iter = 2000;
  double tol = 1e-12;   ///< relative stagnation tolerance on the quotient
  double step0 = 1.0;
};

struct SpectralEstimate {
  double lambda = 0;
  DiscreteFunction minimizer;
  double residual = 0;  ///< dual norm of the quotient gradient at exit
  int iterations = 0;
};

class SpectralFailure : public Error {
public:
  SpectralFailure(const std::string& msg, SpectralEstimate best_estimate)
      : Error(msg), best(std::move(best_estimate)) {}
  SpectralEstimate best;
};

/// Minimizes the Rayleigh quotient of the p-Laplacian over zero-trace
/// piecewise-linear functions by normalized projected descent (Laplace
/// preconditioner, step halving, L^p renormalization each step). Starts
/// from a positive bump. Throws SpectralFailure with the best estimate on
/// non-convergence.
SpectralEstimate lambda_1p(const Mesh& mesh, double p, const SpectralOptions& opts = {});

// Regularized gradient flux ----------------------------------------------
//
// A(z) = (eps^2 + |z|^{p-2}) z, the flux whose divergence form gives the
// operator eps^2 Lap + Lap_p. All maps take the space dimension from z.

Eigen::VectorXd diffusion_flux(double p, double eps, const Eigen::VectorXd& z);

/// Jacobian DA(z) = (eps^2 + |z|^{p-2}) I + (p-2) |z|^{p-2} zhat zhat^T,
/// equal to eps^2 I at z = 0.
Eigen::MatrixXd diffusion_jacobian(double p, double eps, const Eigen::VectorXd& z);

/// Closed-form spectrum of the Jacobian, ascending: eps^2 + |z|^{p-2} with
/// multiplicity N-1 and eps^2 + (p-1) |z|^{p-2} simple.
Eigen::VectorXd diffusion_jacobian_eigs(double p, double eps, const Eigen::VectorXd& z);

/// Two-sided ellipticity bound
///   c_{p-2} (kappa + |z|)^{p-2} |zeta|^2 <= DA(z) zeta . zeta
///                                        <= 2 (p-1) (kappa + |z|)^{p-2} |zeta|^2
/// with kappa = |eps|^{2/(p-2)} and c_beta = 1 for beta < 1, 2^{1-beta}
/// otherwise. Returns whether both inequalities hold (up to rounding).
bool ellipticity_bounds_check(double p, double eps, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& zeta);

}  // namespace nodal
