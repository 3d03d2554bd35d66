#include "nodal/diagnostics.hpp"

#include <cmath>
#include <queue>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "nodal/nehari.hpp"

namespace nodal {

Inertia matrix_inertia(const Eigen::MatrixXd& H, double tol_eig) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DiagnosticError("symmetric eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double rho = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  const double cut = tol_eig * rho;
  Inertia inertia;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -cut)
      ++inertia.negative;
    else if (ev(i) <= cut)
      ++inertia.zero;
    else
      ++inertia.positive;
  }
  return inertia;
}

std::vector<std::vector<int>> nodal_components(const DiscreteFunction& u, double threshold) {
  if (threshold < 0.0) throw InvalidArgument("nodal threshold must be >= 0");
  const Mesh& mesh = u.mesh();
  const AdjacencyGraph graph = vertex_adjacency(mesh);

  // sign class per vertex: +1, -1 or 0 (inside the threshold band)
  std::vector<int> cls(mesh.vertex_count(), 0);
  bool any = false;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const double c = u.values()(v);
    if (c > threshold)
      cls[v] = 1;
    else if (c < -threshold)
      cls[v] = -1;
    if (cls[v] != 0) any = true;
  }
  if (!any) throw DiagnosticError("function vanishes within the nodal threshold");

  std::vector<std::vector<int>> components;
  std::vector<bool> seen(mesh.vertex_count(), false);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (cls[v] == 0 || seen[v]) continue;
    std::vector<int> comp;
    std::queue<int> todo;
    todo.push(v);
    seen[v] = true;
    while (!todo.empty()) {
      const int w = todo.front();
      todo.pop();
      comp.push_back(w);
      for (int x : graph.neighbors[w])
        if (!seen[x] && cls[x] == cls[v]) {
          seen[x] = true;
          todo.push(x);
        }
    }
    components.push_back(std::move(comp));
  }
  return components;
}

int nodal_domains(const DiscreteFunction& u, double threshold) {
  return static_cast<int>(nodal_components(u, threshold).size());
}

IndexReport morse_index_report(const EnergyFunctional& functional, double eps,
                               const DiscreteFunction& u, double tol_eig, double threshold_rel) {
  const Eigen::MatrixXd H = functional.hessian(eps, u);
  const Inertia inertia = matrix_inertia(H, tol_eig);

  IndexReport report;
  report.morse_index = inertia.negative;
  report.nullity = inertia.zero;
  report.nodal_domains = nodal_domains(u, threshold_rel * u.max_abs());

  const Eigen::VectorXd up = positive_part(u).interior();
  const Eigen::VectorXd un = negative_part(u).interior();
  report.neg_dir_pos = up.dot(H * up) < 0.0;
  report.neg_dir_neg = un.dot(H * un) < 0.0;
  return report;
}

bool index_nodal_consistency(const EnergyFunctional& functional, double eps,
                             const DiscreteFunction& u, double tol_eig, double threshold,
                             double residual_cap) {
  const Mesh& mesh = functional.mesh();

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(laplace_stiffness(mesh));
  if (llt.info() != Eigen::Success) throw DiagnosticError("stiffness factorization failed");
  const Eigen::VectorXd r = functional.gradient(eps, u);
  const double residual = std::sqrt(std::max(0.0, r.dot(llt.solve(r)))) /
                          (1.0 + std::abs(functional.value(eps, u)));
  if (residual > residual_cap)
    throw InvalidArgument("index/nodal consistency requires a near-critical function");

  const Eigen::MatrixXd H = functional.hessian(eps, u);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DiagnosticError("symmetric eigensolver failed");
  const double rho = solver.eigenvalues().cwiseAbs().maxCoeff();
  const double cut = tol_eig * rho;
  int morse = 0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    if (solver.eigenvalues()(i) < -cut) ++morse;

  const double thr = threshold > 0.0 ? threshold : 1e-8 * u.max_abs();
  const auto components = nodal_components(u, thr);
  if (static_cast<int>(components.size()) > morse) return false;

  // Nodal restrictions of u as interior vectors.
  std::vector<Eigen::VectorXd> restrictions;
  restrictions.reserve(components.size());
  for (const auto& comp : components) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.interior_count());
    for (int vid : comp) {
      const int dof = mesh.interior_index[vid];
      if (dof >= 0) v(dof) = u.values()(vid);
    }
    restrictions.push_back(std::move(v));
  }

  for (std::size_t a = 0; a < restrictions.size(); ++a) {
    const Eigen::VectorXd Hva = H * restrictions[a];
    if (restrictions[a].dot(Hva) >= 0.0) return false;
    for (std::size_t b = a + 1; b < restrictions.size(); ++b) {
      const double cross = std::abs(restrictions[b].dot(Hva));
      const double scale = rho * restrictions[a].norm() * restrictions[b].norm();
      if (cross > 1e-8 * scale) return false;
    }
  }
  return true;
}

}  // namespace nodal
