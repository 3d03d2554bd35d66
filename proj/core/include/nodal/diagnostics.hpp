#pragma once

#include <vector>

#include "nodal/functional.hpp"

namespace nodal {

struct Inertia {
  int negative = 0, zero = 0, positive = 0;
};

/// Signature of a symmetric matrix: eigenvalues below -tol_eig * rho count
/// as negative, those within tol_eig * rho of zero as null (rho = spectral
/// radius). Also the synthetic-matrix test hook for the index machinery.
Inertia matrix_inertia(const Eigen::MatrixXd& H, double tol_eig = 1e-9);

struct IndexReport {
  int morse_index = 0;
  int nullity = 0;
  int nodal_domains = 0;
  /// Whether the sign parts of u are themselves negative directions of the
  /// Hessian, the two directions witnessing index >= 2.
  bool neg_dir_pos = false;
  bool neg_dir_neg = false;
};

/// Hessian inertia at u plus nodal-domain count (threshold is relative to
/// |u|_inf) and the sign-part negativity witnesses.
IndexReport morse_index_report(const EnergyFunctional& functional, double eps,
                               const DiscreteFunction& u, double tol_eig = 1e-9,
                               double threshold_rel = 1e-8);

/// Connected components of {u > threshold} and {u < -threshold} in the
/// vertex adjacency graph, as vertex lists. Throws DiagnosticError when u
/// is below the threshold everywhere.
std::vector<std::vector<int>> nodal_components(const DiscreteFunction& u, double threshold);

int nodal_domains(const DiscreteFunction& u, double threshold);

/// Checks the structural relation between nodal domains and the index at a
/// near-critical u: the domain count never exceeds the Morse index, the
/// Hessian is block-diagonal across the nodal restrictions of u (cross
/// terms below 1e-8 relative to the spectral scale) and every diagonal
/// block is negative on its restriction. Requires the scaled dual residual
/// at u (dual norm over 1 + |J_eps(u)|) to be at most residual_cap.
bool index_nodal_consistency(const EnergyFunctional& functional, double eps,
                             const DiscreteFunction& u, double tol_eig = 1e-9,
                             double threshold = 0.0, double residual_cap = 1e-7);

}  // namespace nodal
