#include "nodal/nehari.hpp"

#include <cmath>
#include <string>

namespace nodal {

DiscreteFunction positive_part(const DiscreteFunction& v) {
  return DiscreteFunction::from_values(v.mesh(), v.values().cwiseMax(0.0));
}

DiscreteFunction negative_part(const DiscreteFunction& v) {
  return DiscreteFunction::from_values(v.mesh(), v.values().cwiseMin(0.0));
}

RayProjection project_ray(const EnergyFunctional& functional, double eps,
                          const DiscreteFunction& v, double tol_proj, double t_init) {
  if (v.is_zero()) throw InvalidArgument("cannot project the zero function");
  if (!(t_init > 0.0)) throw InvalidArgument("ray projection needs t_init > 0");

  const Nonlinearity& nl = functional.nonlinearity();
  const RaySamples rs = functional.ray_samples(v);

  // gamma_eps(t v) = t g'(t); convergence is judged on the defect
  // |gamma| / (1 + |grad(t v)|_p^p) so the test is scale-free.
  auto defect_at = [&](double t, double dg) {
    return std::abs(t * dg) / (1.0 + std::pow(t, rs.p) * rs.dirichletp);
  };

  constexpr double t_min = 1e-12, t_max = 1e12;
  auto dg = [&](double t) { return rs.dg(nl, eps, t); };

  // Bracket the unique sign change of g' by factor-2 expansion: g' is
  // positive to the left of the maximizer and negative to the right.
  double lo = t_init, hi = t_init;
  double dcur = dg(t_init);
  if (dcur > 0.0) {
    while (dcur > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > t_max)
        throw ProjectionFailure("ray projection: no sign change of g' below scale bound");
      dcur = dg(hi);
    }
  } else if (dcur < 0.0) {
    while (dcur < 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < t_min)
        throw ProjectionFailure("ray projection: no sign change of g' above scale bound");
      dcur = dg(lo);
    }
  }

  double t = lo == hi ? lo : 0.5 * (lo + hi);
  double dgt = dg(t);
  double defect = defect_at(t, dgt);
  int iter = 0;
  while (defect > tol_proj && iter < 200) {
    ++iter;
    if (dgt > 0.0)
      lo = t;
    else if (dgt < 0.0)
      hi = t;
    else
      break;
    const double curv = rs.d2g(nl, eps, t);
    double next = curv < 0.0 ? t - dgt / curv : 0.5 * (lo + hi);
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-17 * t) break;  // bracket exhausted
    t = next;
    dgt = dg(t);
    defect = defect_at(t, dgt);
  }
  if (defect > tol_proj)
    throw ProjectionFailure("ray projection stalled at defect " + std::to_string(defect));

  return RayProjection{t, v.scaled(t), rs.g(nl, eps, t), iter, defect};
}

NodalProjection project_nodal(const EnergyFunctional& functional, double eps,
                              const DiscreteFunction& v, double tol_proj) {
  const DiscreteFunction vpos = positive_part(v);
  const DiscreteFunction vneg = negative_part(v);
  if (vpos.is_zero() || vneg.is_zero())
    throw InvalidArgument("nodal projection needs a sign-changing function");

  const RayProjection rpos = project_ray(functional, eps, vpos, tol_proj);
  const RayProjection rneg = project_ray(functional, eps, vneg, tol_proj);

  return NodalProjection{rpos.tau,
                         rneg.tau,
                         DiscreteFunction::from_values(
                             v.mesh(), rpos.tau * vpos.values() + rneg.tau * vneg.values()),
                         rpos.g_value + rneg.g_value,
                         rpos.defect,
                         rneg.defect};
}

double tangency_defect(const EnergyFunctional& functional, double eps,
                       const DiscreteFunction& v) {
  const Nonlinearity& nl = functional.nonlinearity();
  const RaySamples rs = functional.ray_samples(v);
  double reaction = 0.0;
  for (Eigen::Index k = 0; k < rs.values.size(); ++k) {
    const double vk = rs.values(k);
    reaction += rs.weights(k) * (nl.fprime(vk) * vk * vk + nl.f(vk) * vk);
  }
  return 2.0 * eps * eps * rs.dirichlet2 + rs.p * rs.dirichletp - reaction;
}

}  // namespace nodal
