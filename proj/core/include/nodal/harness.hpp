#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nodal/diagnostics.hpp"
#include "nodal/solver.hpp"

namespace nodal {

/// Buildable description of one of the two supported domains.
struct MeshSpec {
  std::string kind;  ///< "interval" or "rect"
  int n = 0;         ///< interval elements
  int nx = 0, ny = 0;
  double a = 0.0, b = 1.0;          ///< interval extents
  double width = 1.0, height = 1.0; ///< rectangle extents

  Mesh build() const;
  int dim() const;
};

/// Full problem description: domain, reaction term and regularization.
/// eps is canonicalized to |eps| since only eps^2 enters the equations.
struct ProblemSpec {
  MeshSpec mesh;
  double p = 3.0, q = 4.0, mu = 0.0, kappa = 1.0;
  double eps = 0.0;

  Nonlinearity nonlinearity() const { return Nonlinearity(p, q, mu, kappa); }
};

/// One persisted run: problem, solver outcome, diagnostics and the solution
/// coefficients, stable under JSON round trips.
struct RunRecord {
  int schema_version = 1;
  std::string status = "ok";  ///< "ok" or "failed"
  std::string error;          ///< failure reason when status != "ok"
  ProblemSpec problem;
  double energy = 0, residual = 0;
  int iterations = 0;
  int morse_index = 0, nullity = 0, nodal_domains = 0;
  Eigen::VectorXd solution_coeffs;
  SolveOptions options;
  double wall_time_s = 0;
};

/// multi_start plus diagnostics rolled into one record. Solver and
/// diagnostic failures are captured in the record's status rather than
/// thrown; only an invalid ProblemSpec throws.
RunRecord solve_once(const ProblemSpec& spec, const SolveOptions& opts = {});

struct SweepReport {
  std::vector<double> eps_grid;
  std::vector<RunRecord> records;
  std::vector<double> alphas;       ///< energy per grid point
  std::vector<double> u_distances;  ///< |grad(u_eps - u_0)|_p per eps > 0
  bool monotone = false;
  bool decay_ok = false;  ///< u-distance at the smallest eps below the largest
  double fit_C = 0;       ///< max over eps > 0 of (alpha_eps - alpha_0) / eps^2
  double fit_slope = 0;   ///< log-log least-squares slope of the energy gap
  double fit_residual = 0;
};

/// Continuation in eps: full multi_start at eps = 0, then warm starts from
/// the previous solution (re-projected at the new eps). Failed grid points
/// are marked in their records and skipped in the fits.
SweepReport sweep_epsilon(const ProblemSpec& base, const std::vector<double>& eps_grid,
                          const SolveOptions& opts = {});

/// Strictly-increasing verdict with an absolute tolerance on violations.
bool check_alpha_monotone(const std::vector<double>& alphas, double tol = 1e-10);

struct GapFit {
  double C = 0, slope = 0, residual = 0;
};

/// Least-squares fit of log(alpha_eps - alpha_0) against log(eps).
GapFit fit_quadratic_gap(const std::vector<double>& eps, const std::vector<double>& gaps);

std::string record_to_json(const RunRecord& record);
RunRecord record_from_json(const std::string& text);

/// Recomputes energy, residual and diagnostics from the stored coefficients
/// and compares with the stored values (absolute-plus-relative tolerance).
bool revalidate_record(const RunRecord& record, double tol = 1e-10);

/// RFC 4180 CSV with header
///   eps,energy,morse_index,nullity,nodal_domains,residual,iterations
/// and round-trip (17 significant digit) numeric formatting.
std::string export_csv(const std::vector<RunRecord>& records);

/// Minimal RFC 4180 reader: rows of fields, quotes unescaped.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// Entry point behind the `nodal` executable: subcommands solve, sweep,
/// validate, eigen. Returns 0 on success, 1 on solver/diagnostic failure,
/// 2 on invalid arguments.
int cli_main(int argc, const char* const* argv);

}  // namespace nodal
