#pragma once

#include <string>

namespace nodal {

/// Model reaction term
///   f(t) = mu |t|^{p-2} t + kappa |t|^{q-2} t,
/// with primitive F and derivative f'. The construction also fixes the
/// superlinearity exponent m in (p, q] and the threshold T > 0 beyond
/// which f(t) t >= m F(t) > 0:
///   mu <= 0: m = q and any T with F(T) > 0 works;
///   mu  > 0: m = (p+q)/2 and
///            T = (mu (m/p - 1) / (kappa (1 - m/q)))^{1/(q-p)}.
struct Nonlinearity {
  double p = 0, q = 0, mu = 0, kappa = 0;
  double m = 0;  ///< superlinearity exponent, in (p, q]
  double T = 0;  ///< superlinearity threshold

  Nonlinearity(double p, double q, double mu, double kappa);

  double f(double t) const;
  double F(double t) const;
  double fprime(double t) const;
};

/// Outcome of checking the structural hypotheses on f for a given domain
/// dimension and first p-Laplacian eigenvalue. Failures are reported, not
/// thrown.
struct HypothesisReport {
  bool growth_ok = false;       ///< p < q < p* (critical Sobolev exponent)
  bool superlinear_ok = false;  ///< f(t) t >= m F(t) > 0 for |t| >= T
  bool spectral_gap_ok = false; ///< mu < lambda_{1,p}
  bool monotone_ok = false;     ///< q > p and kappa > 0

  double m = 0, T = 0;
  double mu_margin = 0;  ///< lambda_{1,p} - mu

  bool all() const { return growth_ok && superlinear_ok && spectral_gap_ok && monotone_ok; }
};

HypothesisReport validate_hypotheses(const Nonlinearity& nl, double lambda_1p, int dim);

std::string to_string(const HypothesisReport& report);

}  // namespace nodal
