#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nodal/errors.hpp"
#include "nodal/nehari.hpp"

namespace nodal {

struct SolveOptions {
  double tol_grad = 1e-8;   ///< scaled dual residual target
  double tol_proj = 1e-10;  ///< Nehari defect target per sign part
  int max_iter = 10000;
  double step0 = 1.0;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int n_starts = 8;
  std::uint64_t seed = 0;
};

struct Solution {
  DiscreteFunction u;
  double energy = 0;    ///< J_eps(u)
  double residual = 0;  ///< sqrt(r^T G^-1 r) / (1 + |J_eps(u)|), r = gradient at u
  std::pair<double, double> proj_defects{0, 0};
  int iterations = 0;
  bool converged = false;

  // Run diagnostics, tracked across all accepted iterates.
  double min_signpart_seminorm = 0;  ///< min over iterates of |grad w+-|_p
  bool energy_monotone = true;       ///< projected energies never increased
  bool coercive_floor_ok = true;     ///< J >= (1/p - 1/m) |grad w|_p^p + C held
};

/// Projected descent on the nodal Nehari set: each iterate is re-projected
/// (both sign parts scaled onto the Nehari set), stepped along the Laplace-
/// preconditioned negative gradient, and accepted by an Armijo test on the
/// projected energy. Stops when the dual residual of the projected iterate,
/// scaled by 1 + |J_eps|, drops below tol_grad; reaching max_iter yields
/// converged = false.
Solution minimize_nodal(const EnergyFunctional& functional, double eps,
                        const DiscreteFunction& init, const SolveOptions& opts = {});

/// Deterministic start family: one sign-changing low-mode profile plus
/// seeded random low-frequency combinations, all sign-changing.
std::vector<DiscreteFunction> default_starts(const Mesh& mesh, int n_starts,
                                             std::uint64_t seed);

struct StartOutcome {
  int index = 0;
  bool converged = false;
  double energy = 0;
  double residual = 0;
  int iterations = 0;
};

/// Thrown when no start converges; carries the best partial result if any
/// start at least produced an iterate.
class MultiStartFailure : public Error {
public:
  MultiStartFailure(const std::string& msg, std::optional<Solution> best_partial)
      : Error(msg), best(std::move(best_partial)) {}
  std::optional<Solution> best;
};

/// Runs minimize_nodal from each default start and returns the converged
/// solution of lowest energy (ties keep the lower start index). Per-start
/// summaries are appended to *outcomes when given.
Solution multi_start(const EnergyFunctional& functional, double eps, const SolveOptions& opts = {},
                     std::vector<StartOutcome>* outcomes = nullptr);

/// Inner maximum of the min-max characterization: the energy of the nodal
/// projection of v, i.e. max over the quadrant of J_eps(t v+) + J_eps(s v-).
double minmax_energy(const EnergyFunctional& functional, double eps, const DiscreteFunction& v,
                     double tol_proj = 1e-10);

}  // namespace nodal
