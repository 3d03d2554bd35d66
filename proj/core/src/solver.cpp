#include "nodal/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>

#include "nodal/log.hpp"

namespace nodal {

namespace {

constexpr double kCollapseFloor = 1e-14;

// Lower bound constant for the coercivity floor on the Nehari set:
//   J(w) >= (1/p - 1/m) |grad w|_p^p + C,
// C = -|Omega| / m * sup_{|t| <= T} (m F(t) - f(t) t)+ . For mu <= 0 the
// supremum is zero.
double coercivity_constant(const Nonlinearity& nl, double measure) {
  if (nl.mu <= 0.0) return 0.0;
  double sup = 0.0;
  const int samples = 2000;
  for (int i = 0; i <= samples; ++i) {
    const double t = nl.T * i / samples;
    sup = std::max(sup, nl.m * nl.F(t) - nl.f(t) * t);
  }
  return -measure / nl.m * sup;
}

double signpart_seminorm(const EnergyFunctional& functional, const DiscreteFunction& part) {
  const double p = functional.nonlinearity().p;
  return std::pow(functional.energy(0.0, part).dirichletp, 1.0 / p);
}

}  // namespace

Solution minimize_nodal(const EnergyFunctional& functional, double eps,
                        const DiscreteFunction& init, const SolveOptions& opts) {
  const Mesh& mesh = functional.mesh();
  if (&init.mesh() != &mesh) throw InvalidArgument("init is bound to a different mesh");
  if (positive_part(init).is_zero() || negative_part(init).is_zero())
    throw InvalidArgument("init must be sign-changing");
  if (positive_part(init).max_abs() < kCollapseFloor ||
      negative_part(init).max_abs() < kCollapseFloor)
    throw DegenerateIterate("a sign part of the initial iterate is below the collapse floor");

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(laplace_stiffness(mesh));
  if (llt.info() != Eigen::Success)
    throw DiagnosticError("Laplace preconditioner factorization failed");

  const Nonlinearity& nl = functional.nonlinearity();
  const double floor_slope = 1.0 / nl.p - 1.0 / nl.m;
  const double floor_const = coercivity_constant(nl, mesh.measure());

  NodalProjection np = project_nodal(functional, eps, init, opts.tol_proj);
  double energy = functional.value(eps, np.projected);

  Solution sol{np.projected, energy, 0.0, {np.defect_pos, np.defect_neg}, 0, false,
               std::numeric_limits<double>::infinity(), true, true};

  double step = opts.step0;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const DiscreteFunction& w = np.projected;

    const DiscreteFunction wpos = positive_part(w);
    const DiscreteFunction wneg = negative_part(w);
    if (wpos.max_abs() < kCollapseFloor || wneg.max_abs() < kCollapseFloor)
      throw DegenerateIterate("a sign part collapsed during descent");
    sol.min_signpart_seminorm = std::min(
        {sol.min_signpart_seminorm, signpart_seminorm(functional, wpos),
         signpart_seminorm(functional, wneg)});

    const EnergyParts parts = functional.energy(eps, w);
    const double floor = floor_slope * parts.dirichletp + floor_const;
    if (energy < floor - 1e-9 * (1.0 + std::abs(energy))) sol.coercive_floor_ok = false;

    const Eigen::VectorXd r = functional.gradient(eps, w);
    const Eigen::VectorXd pre = llt.solve(r);
    // Scaled dual residual: tol_grad is invariant under the energy magnitude.
    const double res = std::sqrt(std::max(0.0, r.dot(pre))) / (1.0 + std::abs(energy));

    sol.u = w;
    sol.energy = energy;
    sol.residual = res;
    sol.proj_defects = {np.defect_pos, np.defect_neg};
    sol.iterations = it;
    if (res <= opts.tol_grad) {
      sol.converged = true;
      log::debug("minimize_nodal converged: J=" + std::to_string(energy) + " res=" +
                 std::to_string(res) + " iters=" + std::to_string(it));
      return sol;
    }
    if (it == opts.max_iter) break;

    // Armijo backtracking on the projected energy along the preconditioned
    // descent direction. The slope r.d is exact for the composite map at a
    // projected point because the projection only rescales the sign parts,
    // directions along which DJ vanishes on the Nehari set.
    const Eigen::VectorXd d = -pre;
    const double slope = r.dot(d);
    const Eigen::VectorXd w_int = w.interior();

    bool accepted = false;
    double trial = std::min(step * 2.0, 1e6 * opts.step0);
    for (int bt = 0; bt < 80; ++bt) {
      DiscreteFunction cand = DiscreteFunction::from_interior(mesh, w_int + trial * d);
      if (positive_part(cand).max_abs() >= kCollapseFloor &&
          negative_part(cand).max_abs() >= kCollapseFloor) {
        try {
          NodalProjection cand_np = project_nodal(functional, eps, cand, opts.tol_proj);
          const double cand_energy = functional.value(eps, cand_np.projected);
          if (cand_energy <= energy + opts.armijo_c * trial * slope) {
            if (cand_energy > energy + 1e-12 * (1.0 + std::abs(energy)))
              sol.energy_monotone = false;
            np = std::move(cand_np);
            energy = cand_energy;
            step = trial;
            accepted = true;
            break;
          }
        } catch (const ProjectionFailure&) {
          // treat as a failed trial step and shrink
        }
      }
      trial *= opts.backtrack;
    }
    if (!accepted) {
      log::debug("minimize_nodal stalled at residual " + std::to_string(res));
      break;  // line search exhausted; report the best projected iterate
    }
  }
  sol.converged = sol.residual <= opts.tol_grad;
  return sol;
}

std::vector<DiscreteFunction> default_starts(const Mesh& mesh, int n_starts,
                                             std::uint64_t seed) {
  if (n_starts < 1) throw InvalidArgument("n_starts must be >= 1");
  const Eigen::RowVectorXd lo = mesh.vertices.colwise().minCoeff();
  const Eigen::RowVectorXd hi = mesh.vertices.colwise().maxCoeff();
  const double pi = std::acos(-1.0);

  auto mode = [&](int vid, int k, int d) {
    const double x = (mesh.vertices(vid, d) - lo(d)) / (hi(d) - lo(d));
    return std::sin(k * pi * x);
  };

  std::vector<DiscreteFunction> starts;
  {
    // Deterministic sign-changing low mode: one full oscillation in the
    // first coordinate, ground-mode profile in the second.
    Eigen::VectorXd values(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v)
      values(v) = mode(v, 2, 0) * (mesh.dim == 2 ? mode(v, 1, 1) : 1.0);
    starts.push_back(DiscreteFunction::from_values(mesh, values));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  while (static_cast<int>(starts.size()) < n_starts) {
    Eigen::VectorXd values = Eigen::VectorXd::Zero(mesh.vertex_count());
    if (mesh.dim == 1) {
      double c[4];
      for (double& ck : c) ck = coeff(rng);
      for (int v = 0; v < mesh.vertex_count(); ++v)
        for (int k = 1; k <= 4; ++k) values(v) += c[k - 1] * mode(v, k, 0);
    } else {
      double c[4];
      for (double& ck : c) ck = coeff(rng);
      for (int v = 0; v < mesh.vertex_count(); ++v)
        for (int k = 1; k <= 2; ++k)
          for (int l = 1; l <= 2; ++l)
            values(v) += c[(k - 1) * 2 + (l - 1)] * mode(v, k, 0) * mode(v, l, 1);
    }
    DiscreteFunction v = DiscreteFunction::from_values(mesh, values);
    if (!positive_part(v).is_zero() && !negative_part(v).is_zero()) starts.push_back(std::move(v));
  }
  return starts;
}

Solution multi_start(const EnergyFunctional& functional, double eps, const SolveOptions& opts,
                     std::vector<StartOutcome>* outcomes) {
  const std::vector<DiscreteFunction> starts =
      default_starts(functional.mesh(), opts.n_starts, opts.seed);

  std::optional<Solution> best;
  std::optional<Solution> best_partial;
  for (int i = 0; i < static_cast<int>(starts.size()); ++i) {
    try {
      Solution sol = minimize_nodal(functional, eps, starts[i], opts);
      if (outcomes)
        outcomes->push_back({i, sol.converged, sol.energy, sol.residual, sol.iterations});
      if (!best_partial || sol.energy < best_partial->energy) best_partial = sol;
      if (sol.converged && (!best || sol.energy < best->energy)) best = sol;
      log::info("start " + std::to_string(i) + ": J=" + std::to_string(sol.energy) +
                (sol.converged ? " (converged)" : " (not converged)"));
    } catch (const Error& err) {
      if (outcomes) outcomes->push_back({i, false, 0.0, 0.0, 0});
      log::info("start " + std::to_string(i) + ": failed (" + err.what() + ")");
    }
  }
  if (!best) throw MultiStartFailure("no start converged", std::move(best_partial));
  return *best;
}

double minmax_energy(const EnergyFunctional& functional, double eps, const DiscreteFunction& v,
                     double tol_proj) {
  return project_nodal(functional, eps, v, tol_proj).energy;
}

}  // namespace nodal
