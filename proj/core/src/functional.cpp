#include "nodal/functional.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "nodal/log.hpp"

namespace nodal {

namespace {

// |z|^{e} for e > 0 with the continuous-extension convention 0^e = 0.
inline double pow_norm(double norm2, double e) {
  return norm2 == 0.0 ? 0.0 : std::pow(norm2, 0.5 * e);
}

// Fixed reaction quadrature: three-point Gauss-Legendre on the reference
// interval (degree 5) or the interior barycentric three-point rule on the
// triangle (degree 2). Weights sum to one; element volume multiplies in.
void reaction_quadrature(int dim, Eigen::MatrixXd& basis, Eigen::VectorXd& qw) {
  if (dim == 1) {
    const double off = 0.5 * std::sqrt(0.6);
    basis.resize(3, 2);
    qw.resize(3);
    const double nodes[3] = {0.5 - off, 0.5, 0.5 + off};
    const double w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    for (int k = 0; k < 3; ++k) {
      basis(k, 0) = 1.0 - nodes[k];
      basis(k, 1) = nodes[k];
      qw(k) = w[k];
    }
  } else {
    basis.resize(3, 3);
    qw = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    const double a = 2.0 / 3.0, b = 1.0 / 6.0;
    basis << a, b, b, b, a, b, b, b, a;
  }
}

}  // namespace

// DiscreteFunction --------------------------------------------------------

DiscreteFunction DiscreteFunction::from_values(const Mesh& mesh, Eigen::VectorXd values) {
  if (values.size() != mesh.vertex_count())
    throw InvalidArgument("nodal value vector does not match the mesh");
  DiscreteFunction v(mesh);
  v.values_ = std::move(values);
  for (int b = 0; b < mesh.vertex_count(); ++b)
    if (mesh.boundary[b]) v.values_(b) = 0.0;
  return v;
}

DiscreteFunction DiscreteFunction::from_interior(const Mesh& mesh,
                                                 const Eigen::VectorXd& interior) {
  if (interior.size() != mesh.interior_count())
    throw InvalidArgument("interior value vector does not match the mesh");
  DiscreteFunction v(mesh);
  for (int k = 0; k < mesh.interior_count(); ++k)
    v.values_(mesh.interior_vertices[k]) = interior(k);
  return v;
}

Eigen::VectorXd DiscreteFunction::interior() const {
  Eigen::VectorXd out(mesh_->interior_count());
  for (int k = 0; k < mesh_->interior_count(); ++k)
    out(k) = values_(mesh_->interior_vertices[k]);
  return out;
}

DiscreteFunction DiscreteFunction::scaled(double c) const {
  DiscreteFunction v(*mesh_);
  v.values_ = c * values_;
  return v;
}

// RaySamples ---------------------------------------------------------------

double RaySamples::g(const Nonlinearity& nl, double eps, double t) const {
  double pot = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) pot += weights(k) * nl.F(t * values(k));
  return 0.5 * eps * eps * t * t * dirichlet2 + std::pow(t, p) / p * dirichletp - pot;
}

double RaySamples::dg(const Nonlinearity& nl, double eps, double t) const {
  double reaction = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k)
    reaction += weights(k) * nl.f(t * values(k)) * values(k);
  return eps * eps * t * dirichlet2 + std::pow(t, p - 1.0) * dirichletp - reaction;
}

double RaySamples::d2g(const Nonlinearity& nl, double eps, double t) const {
  double reaction = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k)
    reaction += weights(k) * nl.fprime(t * values(k)) * values(k) * values(k);
  return eps * eps * dirichlet2 + (p - 1.0) * std::pow(t, p - 2.0) * dirichletp - reaction;
}

// EnergyFunctional ----------------------------------------------------------

EnergyFunctional::EnergyFunctional(const Mesh& mesh, Nonlinearity nl)
    : mesh_(&mesh), nl_(std::move(nl)) {
  reaction_quadrature(mesh.dim, quad_basis_, quad_w_);
}

void EnergyFunctional::check_mesh(const DiscreteFunction& v) const {
  if (&v.mesh() != mesh_)
    throw InvalidArgument("discrete function is bound to a different mesh");
}

EnergyParts EnergyFunctional::energy(double eps, const DiscreteFunction& v) const {
  (void)eps;  // parts are eps-independent; eps enters in EnergyParts::total
  check_mesh(v);
  EnergyParts parts;
  const int nloc = mesh_->dim + 1;
  Eigen::VectorXd local(nloc);
  for (int e = 0; e < mesh_->element_count(); ++e) {
    for (int i = 0; i < nloc; ++i) local(i) = v.values()(mesh_->elements(e, i));
    const double vol = mesh_->element_volume(e);
    const double g2 = (mesh_->grad_op[e] * local).squaredNorm();
    parts.dirichlet2 += vol * g2;
    parts.dirichletp += vol * pow_norm(g2, nl_.p);
    for (int k = 0; k < quad_basis_.rows(); ++k)
      parts.potential += vol * quad_w_(k) * nl_.F(quad_basis_.row(k).dot(local));
  }
  return parts;
}

Eigen::VectorXd EnergyFunctional::gradient(double eps, const DiscreteFunction& v) const {
  check_mesh(v);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh_->interior_count());
  const int nloc = mesh_->dim + 1;
  Eigen::VectorXd local(nloc);
  for (int e = 0; e < mesh_->element_count(); ++e) {
    for (int i = 0; i < nloc; ++i) local(i) = v.values()(mesh_->elements(e, i));
    const double vol = mesh_->element_volume(e);
    const Eigen::MatrixXd& gop = mesh_->grad_op[e];
    const Eigen::VectorXd g = gop * local;
    const double weight = eps * eps + pow_norm(g.squaredNorm(), nl_.p - 2.0);
    for (int i = 0; i < nloc; ++i) {
      const int dof = mesh_->interior_index[mesh_->elements(e, i)];
      if (dof < 0) continue;
      double entry = vol * weight * g.dot(gop.col(i));
      for (int k = 0; k < quad_basis_.rows(); ++k)
        entry -= vol * quad_w_(k) * nl_.f(quad_basis_.row(k).dot(local)) * quad_basis_(k, i);
      r(dof) += entry;
    }
  }
  return r;
}

double EnergyFunctional::nehari_defect(double eps, const DiscreteFunction& v) const {
  check_mesh(v);
  double defect = 0.0;
  const int nloc = mesh_->dim + 1;
  Eigen::VectorXd local(nloc);
  for (int e = 0; e < mesh_->element_count(); ++e) {
    for (int i = 0; i < nloc; ++i) local(i) = v.values()(mesh_->elements(e, i));
    const double vol = mesh_->element_volume(e);
    const double g2 = (mesh_->grad_op[e] * local).squaredNorm();
    defect += vol * (eps * eps * g2 + pow_norm(g2, nl_.p));
    for (int k = 0; k < quad_basis_.rows(); ++k) {
      const double vk = quad_basis_.row(k).dot(local);
      defect -= vol * quad_w_(k) * nl_.f(vk) * vk;
    }
  }
  return defect;
}

Eigen::MatrixXd EnergyFunctional::hessian(double eps, const DiscreteFunction& v) const {
  check_mesh(v);
  const int n = mesh_->interior_count();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  const int nloc = mesh_->dim + 1;
  Eigen::VectorXd local(nloc);
  std::vector<int> dof(nloc);
  Eigen::MatrixXd local_h(nloc, nloc);
  for (int e = 0; e < mesh_->element_count(); ++e) {
    for (int i = 0; i < nloc; ++i) {
      local(i) = v.values()(mesh_->elements(e, i));
      dof[i] = mesh_->interior_index[mesh_->elements(e, i)];
    }
    const double vol = mesh_->element_volume(e);
    const Eigen::MatrixXd& gop = mesh_->grad_op[e];
    const Eigen::VectorXd g = gop * local;
    const double g2 = g.squaredNorm();
    const double w = pow_norm(g2, nl_.p - 2.0);
    // Rank-one kernel written with the unit direction so small |g| cannot
    // overflow for p < 4; it vanishes with w when the element is flat.
    Eigen::VectorXd ghat = Eigen::VectorXd::Zero(mesh_->dim);
    if (g2 > 0.0) ghat = g / std::sqrt(g2);
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j <= i; ++j) {
        double entry = vol * (eps * eps + w) * gop.col(i).dot(gop.col(j));
        entry += vol * (nl_.p - 2.0) * w * ghat.dot(gop.col(i)) * ghat.dot(gop.col(j));
        for (int k = 0; k < quad_basis_.rows(); ++k)
          entry -= vol * quad_w_(k) * nl_.fprime(quad_basis_.row(k).dot(local)) *
                   quad_basis_(k, i) * quad_basis_(k, j);
        local_h(i, j) = local_h(j, i) = entry;
      }
    for (int i = 0; i < nloc; ++i) {
      if (dof[i] < 0) continue;
      for (int j = 0; j < nloc; ++j)
        if (dof[j] >= 0) H(dof[i], dof[j]) += local_h(i, j);
    }
  }
  return H;
}

RaySamples EnergyFunctional::ray_samples(const DiscreteFunction& v) const {
  check_mesh(v);
  RaySamples rs;
  rs.p = nl_.p;
  const int nq = static_cast<int>(quad_basis_.rows());
  rs.values.resize(mesh_->element_count() * nq);
  rs.weights.resize(mesh_->element_count() * nq);
  const int nloc = mesh_->dim + 1;
  Eigen::VectorXd local(nloc);
  for (int e = 0; e < mesh_->element_count(); ++e) {
    for (int i = 0; i < nloc; ++i) local(i) = v.values()(mesh_->elements(e, i));
    const double vol = mesh_->element_volume(e);
    const double g2 = (mesh_->grad_op[e] * local).squaredNorm();
    rs.dirichlet2 += vol * g2;
    rs.dirichletp += vol * pow_norm(g2, nl_.p);
    for (int k = 0; k < nq; ++k) {
      rs.values(e * nq + k) = quad_basis_.row(k).dot(local);
      rs.weights(e * nq + k) = vol * quad_w_(k);
    }
  }
  return rs;
}

double EnergyFunctional::lp_integral(const DiscreteFunction& v, double r) const {
  check_mesh(v);
  double out = 0.0;
  const int nloc = mesh_->dim + 1;
  Eigen::VectorXd local(nloc);
  for (int e = 0; e < mesh_->element_count(); ++e) {
    for (int i = 0; i < nloc; ++i) local(i) = v.values()(mesh_->elements(e, i));
    for (int k = 0; k < quad_basis_.rows(); ++k)
      out += mesh_->element_volume(e) * quad_w_(k) *
             std::pow(std::abs(quad_basis_.row(k).dot(local)), r);
  }
  return out;
}

std::string hessian_coordinate_text(const Eigen::MatrixXd& H) {
  std::string out;
  char line[80];
  for (Eigen::Index i = 0; i < H.rows(); ++i)
    for (Eigen::Index j = 0; j < H.cols(); ++j) {
      if (H(i, j) == 0.0) continue;
      std::snprintf(line, sizeof line, "%ld %ld %.17g\n", static_cast<long>(i),
                    static_cast<long>(j), H(i, j));
      out += line;
    }
  return out;
}

Eigen::SparseMatrix<double> laplace_stiffness(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  const int nloc = mesh.dim + 1;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Eigen::MatrixXd& gop = mesh.grad_op[e];
    for (int i = 0; i < nloc; ++i) {
      const int di = mesh.interior_index[mesh.elements(e, i)];
      if (di < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int dj = mesh.interior_index[mesh.elements(e, j)];
        if (dj < 0) continue;
        trip.emplace_back(di, dj, mesh.element_volume(e) * gop.col(i).dot(gop.col(j)));
      }
    }
  }
  Eigen::SparseMatrix<double> G(mesh.interior_count(), mesh.interior_count());
  G.setFromTriplets(trip.begin(), trip.end());
  return G;
}

// lambda_1p ------------------------------------------------------------------

namespace {

// Dirichlet integral of |grad w|^p and its gradient covector.
double p_dirichlet(const Mesh& mesh, const Eigen::VectorXd& values, double p,
                   Eigen::VectorXd* grad) {
  double num = 0.0;
  if (grad) grad->setZero(mesh.interior_count());
  const int nloc = mesh.dim + 1;
  Eigen::VectorXd local(nloc);
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (int i = 0; i < nloc; ++i) local(i) = values(mesh.elements(e, i));
    const double vol = mesh.element_volume(e);
    const Eigen::MatrixXd& gop = mesh.grad_op[e];
    const Eigen::VectorXd g = gop * local;
    const double g2 = g.squaredNorm();
    num += vol * pow_norm(g2, p);
    if (!grad) continue;
    const double w = pow_norm(g2, p - 2.0);
    for (int i = 0; i < nloc; ++i) {
      const int dof = mesh.interior_index[mesh.elements(e, i)];
      if (dof >= 0) (*grad)(dof) += vol * p * w * g.dot(gop.col(i));
    }
  }
  return num;
}

// Integral of |w|^p by the element quadrature rule, with gradient covector.
double p_mass(const Mesh& mesh, const Eigen::MatrixXd& basis, const Eigen::VectorXd& qw,
              const Eigen::VectorXd& values, double p, Eigen::VectorXd* grad) {
  double den = 0.0;
  if (grad) grad->setZero(mesh.interior_count());
  const int nloc = mesh.dim + 1;
  Eigen::VectorXd local(nloc);
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (int i = 0; i < nloc; ++i) local(i) = values(mesh.elements(e, i));
    const double vol = mesh.element_volume(e);
    for (int k = 0; k < basis.rows(); ++k) {
      const double vk = basis.row(k).dot(local);
      const double a = std::abs(vk);
      den += vol * qw(k) * std::pow(a, p);
      if (!grad || a == 0.0) continue;
      const double w = p * std::pow(a, p - 2.0) * vk;
      for (int i = 0; i < nloc; ++i) {
        const int dof = mesh.interior_index[mesh.elements(e, i)];
        if (dof >= 0) (*grad)(dof) += vol * qw(k) * w * basis(k, i);
      }
    }
  }
  return den;
}

}  // namespace

SpectralEstimate lambda_1p(const Mesh& mesh, double p, const SpectralOptions& opts) {
  if (!(p >= 2.0)) throw InvalidArgument("lambda_1p requires p >= 2");
  if (mesh.interior_count() == 0) throw InvalidArgument("mesh has no interior vertices");

  Eigen::MatrixXd basis;
  Eigen::VectorXd qw;
  reaction_quadrature(mesh.dim, basis, qw);

  // Positive bump: product of distances to the opposite domain faces.
  Eigen::VectorXd w0 = Eigen::VectorXd::Zero(mesh.vertex_count());
  const Eigen::RowVectorXd lo = mesh.vertices.colwise().minCoeff();
  const Eigen::RowVectorXd hi = mesh.vertices.colwise().maxCoeff();
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.boundary[v]) continue;
    double b = 1.0;
    for (int d = 0; d < mesh.dim; ++d)
      b *= (mesh.vertices(v, d) - lo(d)) * (hi(d) - mesh.vertices(v, d));
    w0(v) = b;
  }

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(laplace_stiffness(mesh));
  if (llt.info() != Eigen::Success)
    throw DiagnosticError("Laplace preconditioner factorization failed");

  auto normalize = [&](Eigen::VectorXd& values) {
    const double den = p_mass(mesh, basis, qw, values, p, nullptr);
    values /= std::pow(den, 1.0 / p);
  };
  normalize(w0);

  Eigen::VectorXd values = w0;
  Eigen::VectorXd gnum, gden;
  double num = p_dirichlet(mesh, values, p, &gnum);
  double den = p_mass(mesh, basis, qw, values, p, &gden);
  double lambda = num / den;
  double residual = 0.0;
  double step = opts.step0;
  int stagnant = 0;

  auto lift = [&](const Eigen::VectorXd& interior) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.vertex_count());
    for (int k = 0; k < mesh.interior_count(); ++k) full(mesh.interior_vertices[k]) = interior(k);
    return full;
  };

  for (int it = 0; it < opts.max_iter; ++it) {
    const Eigen::VectorXd grad = (gnum - lambda * gden) / den;
    const Eigen::VectorXd precond = llt.solve(grad);
    residual = std::sqrt(std::max(0.0, grad.dot(precond)));

    Eigen::VectorXd interior(mesh.interior_count());
    for (int k = 0; k < mesh.interior_count(); ++k) interior(k) = values(mesh.interior_vertices[k]);

    // Coarse line search over a bracketing candidate set. The fixed
    // candidate 1/2 is the inverse-iteration step for p = 2 and damps the
    // high-frequency modes that a plain monotone step leaves untouched.
    const double candidates[4] = {2.0 * step, step, 0.5 * step, 0.5 * opts.step0};
    double best_step = 0.0, best_num = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_trial;
    for (const double s : candidates) {
      Eigen::VectorXd trial = lift(interior - s * precond);
      const double trial_den = p_mass(mesh, basis, qw, trial, p, nullptr);
      if (!(trial_den > 0.0)) continue;
      trial /= std::pow(trial_den, 1.0 / p);
      const double trial_num = p_dirichlet(mesh, trial, p, nullptr);
      if (trial_num < best_num) {
        best_num = trial_num;
        best_step = s;
        best_trial = std::move(trial);
      }
    }

    if (best_num < lambda * (1.0 - 1e-16)) {
      values = best_trial;
      num = p_dirichlet(mesh, values, p, &gnum);
      den = p_mass(mesh, basis, qw, values, p, &gden);
      const double next = num / den;
      if (lambda - next <= opts.tol * std::max(1.0, std::abs(lambda)))
        ++stagnant;
      else
        stagnant = 0;
      lambda = next;
      step = std::clamp(best_step, 1e-6 * opts.step0, 1e3 * opts.step0);
    } else {
      ++stagnant;
      step = std::max(0.25 * step, 1e-6 * opts.step0);
    }
    if (stagnant >= 3) {
      SpectralEstimate est{lambda, DiscreteFunction::from_values(mesh, values), residual, it + 1};
      log::debug("lambda_1p converged: " + std::to_string(lambda) + " in " +
                 std::to_string(it + 1) + " iterations");
      return est;
    }
  }
  SpectralEstimate best{lambda, DiscreteFunction::from_values(mesh, values), residual,
                        opts.max_iter};
  throw SpectralFailure("lambda_1p did not converge within max_iter", std::move(best));
}

// Diffusion flux -------------------------------------------------------------

Eigen::VectorXd diffusion_flux(double p, double eps, const Eigen::VectorXd& z) {
  return (eps * eps + pow_norm(z.squaredNorm(), p - 2.0)) * z;
}

Eigen::MatrixXd diffusion_jacobian(double p, double eps, const Eigen::VectorXd& z) {
  const Eigen::Index n = z.size();
  const double z2 = z.squaredNorm();
  Eigen::MatrixXd jac =
      (eps * eps + pow_norm(z2, p - 2.0)) * Eigen::MatrixXd::Identity(n, n);
  if (z2 > 0.0) {
    const Eigen::VectorXd zhat = z / std::sqrt(z2);
    jac += (p - 2.0) * pow_norm(z2, p - 2.0) * zhat * zhat.transpose();
  }
  return jac;
}

Eigen::VectorXd diffusion_jacobian_eigs(double p, double eps, const Eigen::VectorXd& z) {
  const Eigen::Index n = z.size();
  const double w = pow_norm(z.squaredNorm(), p - 2.0);
  Eigen::VectorXd eigs(n);
  // p > 2 makes eps^2 + (p-1) w the largest; the transversal value fills
  // the rest, so the vector is already ascending.
  for (Eigen::Index i = 0; i + 1 < n; ++i) eigs(i) = eps * eps + w;
  eigs(n - 1) = eps * eps + (p - 1.0) * w;
  return eigs;
}

bool ellipticity_bounds_check(double p, double eps, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& zeta) {
  if (z.size() != zeta.size()) throw InvalidArgument("z and zeta dimensions differ");
  const double quad = zeta.dot(diffusion_jacobian(p, eps, z) * zeta);
  const double kap = eps == 0.0 ? 0.0 : std::pow(std::abs(eps), 2.0 / (p - 2.0));
  const double base = std::pow(kap + z.norm(), p - 2.0) * zeta.squaredNorm();
  const double c_lower = (p - 2.0) < 1.0 ? 1.0 : std::pow(2.0, 1.0 - (p - 2.0));
  // Upper constant 2(p-1): the largest Jacobian eigenvalue is
  // eps^2 + (p-1)|z|^{p-2} <= (p-1)(eps^2 + |z|^{p-2}) <= 2(p-1)(kap+|z|)^{p-2}.
  const double slack = 1e-12 * (std::abs(quad) + base + 1.0);
  return c_lower * base <= quad + slack && quad <= 2.0 * (p - 1.0) * base + slack;
}

}  // namespace nodal
