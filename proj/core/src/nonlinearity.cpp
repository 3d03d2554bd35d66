#include "nodal/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nodal/errors.hpp"

namespace nodal {

Nonlinearity::Nonlinearity(double p_, double q_, double mu_, double kappa_)
    : p(p_), q(q_), mu(mu_), kappa(kappa_) {
  if (!(p > 2.0)) throw InvalidArgument("nonlinearity requires p > 2");
  if (q > p && kappa > 0.0) {
    if (mu > 0.0) {
      m = 0.5 * (p + q);
      T = std::pow(mu * (m / p - 1.0) / (kappa * (1.0 - m / q)), 1.0 / (q - p));
    } else {
      m = q;
      // F(t) > 0 as soon as |t|^{q-p} > -mu q / (kappa p); stay a factor 2
      // above that root.
      const double root = mu < 0.0 ? std::pow(-mu * q / (kappa * p), 1.0 / (q - p)) : 0.0;
      T = std::max(1.0, 2.0 * root);
    }
  } else {
    // Structurally invalid (q <= p or kappa <= 0); placeholders so the
    // validator can still report the failure.
    m = q;
    T = 1.0;
  }
}

double Nonlinearity::f(double t) const {
  if (t == 0.0) return 0.0;
  const double a = std::abs(t);
  return mu * std::pow(a, p - 2.0) * t + kappa * std::pow(a, q - 2.0) * t;
}

double Nonlinearity::F(double t) const {
  const double a = std::abs(t);
  return mu * std::pow(a, p) / p + kappa * std::pow(a, q) / q;
}

double Nonlinearity::fprime(double t) const {
  const double a = std::abs(t);
  if (a == 0.0) return 0.0;
  return mu * (p - 1.0) * std::pow(a, p - 2.0) + kappa * (q - 1.0) * std::pow(a, q - 2.0);
}

HypothesisReport validate_hypotheses(const Nonlinearity& nl, double lambda_1p, int dim) {
  HypothesisReport report;
  report.m = nl.m;
  report.T = nl.T;
  report.mu_margin = lambda_1p - nl.mu;

  const double pstar = nl.p < static_cast<double>(dim)
                           ? dim * nl.p / (dim - nl.p)
                           : std::numeric_limits<double>::infinity();
  report.growth_ok = nl.p < nl.q && nl.q < pstar;
  report.spectral_gap_ok = nl.mu < lambda_1p;
  report.monotone_ok = nl.q > nl.p && nl.kappa > 0.0;

  // Sample the superlinearity inequality over |t| in [T, 10T] for both signs.
  report.superlinear_ok = report.monotone_ok;
  if (report.superlinear_ok) {
    const int samples = 400;
    for (int i = 0; i <= samples && report.superlinear_ok; ++i) {
      const double a = nl.T * (1.0 + 9.0 * i / samples);
      for (const double t : {a, -a}) {
        const double ft_t = nl.f(t) * t;
        const double mF = nl.m * nl.F(t);
        const double scale = std::abs(ft_t) + std::abs(mF) + 1.0;
        if (!(mF > 0.0) || ft_t - mF < -1e-12 * scale) {
          report.superlinear_ok = false;
          break;
        }
      }
    }
  }
  return report;
}

std::string to_string(const HypothesisReport& report) {
  std::ostringstream out;
  auto line = [&](const char* name, bool ok) { out << name << ": " << (ok ? "ok" : "FAIL") << "\n"; };
  line("growth (p < q < p*)", report.growth_ok);
  line("superlinearity (f(t)t >= m F(t) > 0 beyond T)", report.superlinear_ok);
  line("spectral gap (mu < lambda_1p)", report.spectral_gap_ok);
  line("monotonicity (q > p, kappa > 0)", report.monotone_ok);
  out << "m = " << report.m << ", T = " << report.T << ", lambda_1p - mu = " << report.mu_margin
      << "\n";
  return out.str();
}

}  // namespace nodal
