#pragma once

#include "nodal/functional.hpp"

namespace nodal {

/// Nodewise truncations. positive_part keeps coefficients >= 0, negative_part
/// keeps coefficients <= 0; their sum reproduces the input.
DiscreteFunction positive_part(const DiscreteFunction& v);
DiscreteFunction negative_part(const DiscreteFunction& v);

/// Result of scaling v onto the Nehari set: tau is the unique maximizer of
/// g(t) = J_eps(t v) over t > 0.
struct RayProjection {
  double tau = 0;
  DiscreteFunction projected;
  double g_value = 0;  ///< J_eps(tau v)
  int iterations = 0;
  double defect = 0;  ///< |gamma_eps(tau v)| / (1 + |grad(tau v)|_p^p) at exit
};

/// Finds the Nehari scaling of a nonzero v by bracketing the sign change of
/// g' (factor-2 expansion from t_init, clamped to [1e-12, 1e12]) followed by
/// Newton on g' safeguarded by bisection. gamma_eps(v) > 0 lands tau > 1,
/// gamma_eps(v) < 0 lands tau < 1.
RayProjection project_ray(const EnergyFunctional& functional, double eps,
                          const DiscreteFunction& v, double tol_proj = 1e-10,
                          double t_init = 1.0);

/// Independent ray projections of the two sign parts: the section
/// h(t, s) = J_eps(t v+) + J_eps(s v-) is separable, so the unique maximum
/// over the open quadrant is attained at the per-part Nehari scalings.
struct NodalProjection {
  double t = 0, s = 0;
  DiscreteFunction projected;  ///< t v+ + s v-
  double energy = 0;           ///< J_eps(t v+) + J_eps(s v-)
  double defect_pos = 0, defect_neg = 0;
};

NodalProjection project_nodal(const EnergyFunctional& functional, double eps,
                              const DiscreteFunction& v, double tol_proj = 1e-10);

/// Tangential second variation D gamma_eps(v) v; strictly negative on the
/// Nehari set, which makes it the natural degeneracy diagnostic there.
double tangency_defect(const EnergyFunctional& functional, double eps,
                       const DiscreteFunction& v);

}  // namespace nodal
