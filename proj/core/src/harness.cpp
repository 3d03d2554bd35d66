#include "nodal/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <json.hpp>

#include "nodal/log.hpp"

namespace nodal {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Mesh MeshSpec::build() const {
  if (kind == "interval") return build_interval_mesh(n, a, b);
  if (kind == "rect") return build_rect_mesh(nx, ny, width, height);
  throw InvalidArgument("unknown mesh kind: " + kind);
}

int MeshSpec::dim() const {
  if (kind == "interval") return 1;
  if (kind == "rect") return 2;
  throw InvalidArgument("unknown mesh kind: " + kind);
}

RunRecord solve_once(const ProblemSpec& spec, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord record;
  record.problem = spec;
  record.problem.eps = std::abs(spec.eps);
  record.options = opts;

  const Mesh mesh = spec.mesh.build();
  const Nonlinearity nl = spec.nonlinearity();

  auto fail = [&](const std::string& why) {
    record.status = "failed";
    record.error = why;
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
  };

  // Hypothesis screen. A spec whose reaction term violates the structural
  // assumptions is a usage error, reported in the record.
  try {
    const SpectralEstimate spectral = lambda_1p(mesh, nl.p);
    const HypothesisReport hypotheses = validate_hypotheses(nl, spectral.lambda, mesh.dim);
    if (!hypotheses.all()) return fail("hypotheses violated:\n" + to_string(hypotheses));
  } catch (const SpectralFailure& err) {
    return fail(std::string("lambda_1p failed: ") + err.what());
  }

  const EnergyFunctional functional(mesh, nl);
  try {
    const Solution sol = multi_start(functional, record.problem.eps, opts);
    record.energy = sol.energy;
    record.residual = sol.residual;
    record.iterations = sol.iterations;
    record.solution_coeffs = sol.u.values();
    const IndexReport index = morse_index_report(functional, record.problem.eps, sol.u);
    record.morse_index = index.morse_index;
    record.nullity = index.nullity;
    record.nodal_domains = index.nodal_domains;
  } catch (const Error& err) {
    return fail(err.what());
  }
  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log::info("solve_once: eps=" + format_double(record.problem.eps) +
            " energy=" + format_double(record.energy));
  return record;
}

bool check_alpha_monotone(const std::vector<double>& alphas, double tol) {
  for (std::size_t k = 0; k + 1 < alphas.size(); ++k)
    if (!(alphas[k + 1] - alphas[k] > -tol)) return false;
  return true;
}

GapFit fit_quadratic_gap(const std::vector<double>& eps, const std::vector<double>& gaps) {
  if (eps.size() != gaps.size() || eps.size() < 2)
    throw InvalidArgument("gap fit needs at least two (eps, gap) pairs");
  GapFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(eps.size());
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0) || !(gaps[k] > 0.0))
      throw InvalidArgument("gap fit needs positive eps and gaps");
    const double x = std::log(eps[k]), y = std::log(gaps[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    fit.C = std::max(fit.C, gaps[k] / (eps[k] * eps[k]));
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - fit.slope * sx) / n;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double r = std::log(gaps[k]) - (fit.slope * std::log(eps[k]) + intercept);
    fit.residual += r * r;
  }
  fit.residual = std::sqrt(fit.residual / n);
  return fit;
}

SweepReport sweep_epsilon(const ProblemSpec& base, const std::vector<double>& eps_grid,
                          const SolveOptions& opts) {
  if (eps_grid.empty() || eps_grid.front() != 0.0)
    throw InvalidArgument("eps grid must start at 0");
  for (std::size_t k = 0; k + 1 < eps_grid.size(); ++k)
    if (!(eps_grid[k] < eps_grid[k + 1]))
      throw InvalidArgument("eps grid must be strictly increasing");
  if (eps_grid.back() > 1.0) throw InvalidArgument("eps grid exceeds the supported range [0, 1]");

  SweepReport report;
  report.eps_grid = eps_grid;

  const Mesh mesh = base.mesh.build();
  const EnergyFunctional functional(mesh, base.nonlinearity());

  ProblemSpec spec0 = base;
  spec0.eps = 0.0;
  RunRecord rec0 = solve_once(spec0, opts);
  report.records.push_back(rec0);
  if (rec0.status != "ok") {
    // Nothing to warm start or compare against; report is marked failed at
    // the base point and otherwise empty.
    log::error("sweep base solve failed: " + rec0.error);
    return report;
  }
  report.alphas.push_back(rec0.energy);

  DiscreteFunction u_prev = DiscreteFunction::from_values(mesh, rec0.solution_coeffs);
  const DiscreteFunction u0 = u_prev;

  for (std::size_t k = 1; k < eps_grid.size(); ++k) {
    const double eps = eps_grid[k];
    ProblemSpec spec = base;
    spec.eps = eps;
    RunRecord record;
    record.problem = spec;
    record.options = opts;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      // Warm start: previous solution re-projected at the new eps.
      const NodalProjection warm = project_nodal(functional, eps, u_prev, opts.tol_proj);
      const Solution sol = minimize_nodal(functional, eps, warm.projected, opts);
      if (!sol.converged) throw MultiStartFailure("warm-started solve did not converge", sol);
      record.energy = sol.energy;
      record.residual = sol.residual;
      record.iterations = sol.iterations;
      record.solution_coeffs = sol.u.values();
      const IndexReport index = morse_index_report(functional, eps, sol.u);
      record.morse_index = index.morse_index;
      record.nullity = index.nullity;
      record.nodal_domains = index.nodal_domains;
      u_prev = sol.u;
      report.alphas.push_back(sol.energy);
      const DiscreteFunction diff =
          DiscreteFunction::from_values(mesh, sol.u.values() - u0.values());
      report.u_distances.push_back(
          std::pow(functional.energy(0.0, diff).dirichletp, 1.0 / base.p));
    } catch (const Error& err) {
      record.status = "failed";
      record.error = err.what();
      log::error("sweep point eps=" + format_double(eps) + " failed: " + err.what());
    }
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.records.push_back(std::move(record));
  }

  report.monotone = check_alpha_monotone(report.alphas);
  std::vector<double> eps_pos, gaps;
  for (std::size_t k = 1; k < report.alphas.size(); ++k) {
    const double gap = report.alphas[k] - report.alphas.front();
    if (gap > 0.0) {
      eps_pos.push_back(report.eps_grid[k]);
      gaps.push_back(gap);
    }
  }
  if (eps_pos.size() >= 2) {
    const GapFit fit = fit_quadratic_gap(eps_pos, gaps);
    report.fit_C = fit.C;
    report.fit_slope = fit.slope;
    report.fit_residual = fit.residual;
  }
  report.decay_ok =
      report.u_distances.size() >= 2 && report.u_distances.front() < report.u_distances.back();
  return report;
}

// Persistence ----------------------------------------------------------------

namespace {

nlohmann::ordered_json mesh_spec_to_json(const MeshSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = spec.kind;
  if (spec.kind == "interval") {
    j["n"] = spec.n;
    j["extents"] = {spec.a, spec.b};
  } else {
    j["nx"] = spec.nx;
    j["ny"] = spec.ny;
    j["extents"] = {spec.width, spec.height};
  }
  return j;
}

MeshSpec mesh_spec_from_json(const nlohmann::json& j) {
  MeshSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  if (spec.kind == "interval") {
    spec.n = j.at("n").get<int>();
    spec.a = j.at("extents").at(0).get<double>();
    spec.b = j.at("extents").at(1).get<double>();
  } else if (spec.kind == "rect") {
    spec.nx = j.at("nx").get<int>();
    spec.ny = j.at("ny").get<int>();
    spec.width = j.at("extents").at(0).get<double>();
    spec.height = j.at("extents").at(1).get<double>();
  } else {
    throw InvalidArgument("unknown mesh kind in record: " + spec.kind);
  }
  return spec;
}

}  // namespace

std::string record_to_json(const RunRecord& record) {
  nlohmann::ordered_json j;
  j["schema_version"] = record.schema_version;
  j["status"] = record.status;
  if (record.status != "ok") j["error"] = record.error;
  j["problem"]["mesh"] = mesh_spec_to_json(record.problem.mesh);
  j["problem"]["p"] = record.problem.p;
  j["problem"]["q"] = record.problem.q;
  j["problem"]["mu"] = record.problem.mu;
  j["problem"]["kappa"] = record.problem.kappa;
  j["problem"]["eps"] = record.problem.eps;
  j["result"]["energy"] = record.energy;
  j["result"]["residual"] = record.residual;
  j["result"]["iterations"] = record.iterations;
  j["result"]["morse_index"] = record.morse_index;
  j["result"]["nullity"] = record.nullity;
  j["result"]["nodal_domains"] = record.nodal_domains;
  j["solution"]["coeffs"] = std::vector<double>(
      record.solution_coeffs.data(), record.solution_coeffs.data() + record.solution_coeffs.size());
  j["options"]["tol_grad"] = record.options.tol_grad;
  j["options"]["tol_proj"] = record.options.tol_proj;
  j["options"]["max_iter"] = record.options.max_iter;
  j["options"]["step0"] = record.options.step0;
  j["options"]["armijo_c"] = record.options.armijo_c;
  j["options"]["backtrack"] = record.options.backtrack;
  j["options"]["n_starts"] = record.options.n_starts;
  j["meta"]["seed"] = record.options.seed;
  j["meta"]["wall_time_s"] = record.wall_time_s;
  return j.dump(2);
}

RunRecord record_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("record JSON parse error: ") + e.what());
  }
  RunRecord record;
  try {
    record.schema_version = j.at("schema_version").get<int>();
    if (record.schema_version != 1) throw InvalidArgument("unsupported record schema version");
    record.status = j.at("status").get<std::string>();
    if (j.contains("error")) record.error = j["error"].get<std::string>();
    const auto& problem = j.at("problem");
    record.problem.mesh = mesh_spec_from_json(problem.at("mesh"));
    record.problem.p = problem.at("p").get<double>();
    record.problem.q = problem.at("q").get<double>();
    record.problem.mu = problem.at("mu").get<double>();
    record.problem.kappa = problem.at("kappa").get<double>();
    record.problem.eps = problem.at("eps").get<double>();
    const auto& result = j.at("result");
    record.energy = result.at("energy").get<double>();
    record.residual = result.at("residual").get<double>();
    record.iterations = result.at("iterations").get<int>();
    record.morse_index = result.at("morse_index").get<int>();
    record.nullity = result.at("nullity").get<int>();
    record.nodal_domains = result.at("nodal_domains").get<int>();
    const auto coeffs = j.at("solution").at("coeffs").get<std::vector<double>>();
    record.solution_coeffs =
        Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
    const auto& options = j.at("options");
    record.options.tol_grad = options.at("tol_grad").get<double>();
    record.options.tol_proj = options.at("tol_proj").get<double>();
    record.options.max_iter = options.at("max_iter").get<int>();
    record.options.step0 = options.at("step0").get<double>();
    record.options.armijo_c = options.at("armijo_c").get<double>();
    record.options.backtrack = options.at("backtrack").get<double>();
    record.options.n_starts = options.at("n_starts").get<int>();
    record.options.seed = j.at("meta").at("seed").get<std::uint64_t>();
    record.wall_time_s = j.at("meta").at("wall_time_s").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("record JSON structure error: ") + e.what());
  }
  return record;
}

bool revalidate_record(const RunRecord& record, double tol) {
  if (record.status != "ok") return false;
  const Mesh mesh = record.problem.mesh.build();
  if (record.solution_coeffs.size() != mesh.vertex_count()) return false;
  const EnergyFunctional functional(mesh, record.problem.nonlinearity());
  const DiscreteFunction u = DiscreteFunction::from_values(mesh, record.solution_coeffs);
  const double eps = record.problem.eps;

  auto close = [tol](double a, double b) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); };
  const double energy = functional.value(eps, u);
  if (!close(energy, record.energy)) return false;

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(laplace_stiffness(mesh));
  const Eigen::VectorXd r = functional.gradient(eps, u);
  const double residual =
      std::sqrt(std::max(0.0, r.dot(llt.solve(r)))) / (1.0 + std::abs(energy));
  if (!close(residual, record.residual)) return false;

  const IndexReport index = morse_index_report(functional, eps, u);
  return index.morse_index == record.morse_index && index.nullity == record.nullity &&
         index.nodal_domains == record.nodal_domains;
}

// CSV -------------------------------------------------------------------------

namespace {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    quoted += c;
    if (c == '"') quoted += '"';
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string export_csv(const std::vector<RunRecord>& records) {
  std::string out = "eps,energy,morse_index,nullity,nodal_domains,residual,iterations\r\n";
  for (const RunRecord& record : records) {
    if (record.status != "ok")
      throw InvalidArgument("cannot export a failed record to CSV");
    out += csv_quote(format_double(record.problem.eps)) + ",";
    out += csv_quote(format_double(record.energy)) + ",";
    out += std::to_string(record.morse_index) + ",";
    out += std::to_string(record.nullity) + ",";
    out += std::to_string(record.nodal_domains) + ",";
    out += csv_quote(format_double(record.residual)) + ",";
    out += std::to_string(record.iterations) + "\r\n";
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
      rows.push_back(std::move(row));
      row.clear();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace nodal
