#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nodal/harness.hpp"
#include "nodal/log.hpp"

namespace nodal {

namespace {

MeshSpec parse_mesh_arg(const std::string& text, double a, double b, double width,
                        double height) {
  MeshSpec spec;
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 2 && parts[0] == "interval") {
      spec.kind = "interval";
      spec.n = std::stoi(parts[1]);
      spec.a = a;
      spec.b = b;
      return spec;
    }
    if (parts.size() == 3 && parts[0] == "rect") {
      spec.kind = "rect";
      spec.nx = std::stoi(parts[1]);
      spec.ny = std::stoi(parts[2]);
      spec.width = width;
      spec.height = height;
      return spec;
    }
  } catch (const std::exception&) {
    // fall through to the error below
  }
  throw InvalidArgument("mesh must be interval:N or rect:NX:NY, got '" + text + "'");
}

std::vector<double> parse_grid_arg(const std::string& text) {
  std::vector<double> grid;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidArgument("bad eps grid entry '" + item + "'");
    }
  }
  return grid;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Least-energy sign-changing solutions of -eps^2 Lap u - Lap_p u = f(u)"};
  app.require_subcommand(1);
  // Long-form help only: the short -h would shadow the rectangle height flag --h.
  app.set_help_flag("--help", "print help and exit");

  std::string mesh_arg = "interval:128";
  double a = 0.0, b = 1.0, width = 1.0, height = 1.0;
  ProblemSpec problem;
  SolveOptions opts;
  std::string out_path;
  std::string grid_arg = "0,0.05,0.1,0.2,0.4";

  auto add_mesh_flags = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print help and exit");
    cmd->add_option("--mesh", mesh_arg, "interval:N or rect:NX:NY");
    cmd->add_option("--a", a, "interval left endpoint");
    cmd->add_option("--b", b, "interval right endpoint");
    cmd->add_option("--w", width, "rectangle width");
    cmd->add_option("--h", height, "rectangle height");
  };
  auto add_problem_flags = [&](CLI::App* cmd) {
    cmd->add_option("--p", problem.p, "quasilinear exponent, > 2");
    cmd->add_option("--q", problem.q, "reaction exponent, in (p, p*)");
    cmd->add_option("--mu", problem.mu, "p-power reaction weight");
    cmd->add_option("--kappa", problem.kappa, "q-power reaction weight");
  };
  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--tol-grad", opts.tol_grad, "dual residual target");
    cmd->add_option("--max-iter", opts.max_iter, "descent iteration cap");
    cmd->add_option("--n-starts", opts.n_starts, "multi-start count");
    cmd->add_option("--seed", opts.seed, "start-family RNG seed");
  };

  CLI::App* solve = app.add_subcommand("solve", "one least-energy nodal solve");
  add_mesh_flags(solve);
  add_problem_flags(solve);
  add_solver_flags(solve);
  solve->add_option("--eps", problem.eps, "regularization parameter");
  solve->add_option("--out", out_path, "JSON record output path");

  CLI::App* sweep = app.add_subcommand("sweep", "warm-started continuation in eps");
  add_mesh_flags(sweep);
  add_problem_flags(sweep);
  add_solver_flags(sweep);
  sweep->add_option("--eps-grid", grid_arg, "comma-separated grid starting at 0");
  sweep->add_option("--out", out_path, "output directory for records and CSV");

  CLI::App* validate = app.add_subcommand("validate", "check the reaction-term hypotheses");
  add_mesh_flags(validate);
  add_problem_flags(validate);

  CLI::App* eigen = app.add_subcommand("eigen", "first p-Laplacian eigenvalue of the mesh");
  add_mesh_flags(eigen);
  eigen->add_option("--p", problem.p, "exponent, >= 2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) {  // --help and friends
      app.exit(err);
      return 0;
    }
    std::fprintf(stderr, "%s\n", err.what());
    return 2;
  }

  try {
    const MeshSpec mesh_spec = parse_mesh_arg(mesh_arg, a, b, width, height);
    problem.mesh = mesh_spec;

    if (eigen->parsed()) {
      if (!(problem.p >= 2.0)) {
        std::fprintf(stderr, "eigen requires p >= 2\n");
        return 2;
      }
      const Mesh mesh = mesh_spec.build();
      const SpectralEstimate est = lambda_1p(mesh, problem.p);
      std::printf("lambda_1p = %.12g (residual %.3g, %d iterations)\n", est.lambda, est.residual,
                  est.iterations);
      return 0;
    }

    if (!(problem.p > 2.0)) {
      std::fprintf(stderr, "p must be > 2\n");
      return 2;
    }

    if (validate->parsed()) {
      const Mesh mesh = mesh_spec.build();
      const Nonlinearity nl = problem.nonlinearity();
      const SpectralEstimate est = lambda_1p(mesh, nl.p);
      const HypothesisReport report = validate_hypotheses(nl, est.lambda, mesh.dim);
      std::printf("%s", to_string(report).c_str());
      return report.all() ? 0 : 1;
    }

    if (solve->parsed()) {
      const RunRecord record = solve_once(problem, opts);
      std::printf("status=%s energy=%.12g residual=%.3g index=%d nullity=%d domains=%d\n",
                  record.status.c_str(), record.energy, record.residual, record.morse_index,
                  record.nullity, record.nodal_domains);
      if (!out_path.empty()) write_file_atomic(out_path, record_to_json(record));
      return record.status == "ok" ? 0 : 1;
    }

    // sweep
    const std::vector<double> grid = parse_grid_arg(grid_arg);
    const SweepReport report = sweep_epsilon(problem, grid, opts);
    bool all_ok = true;
    for (std::size_t k = 0; k < report.records.size(); ++k) {
      const RunRecord& record = report.records[k];
      std::printf("eps=%-8g status=%-6s energy=%.12g index=%d domains=%d\n",
                  record.problem.eps, record.status.c_str(), record.energy, record.morse_index,
                  record.nodal_domains);
      all_ok = all_ok && record.status == "ok";
    }
    std::printf("monotone=%s fit_slope=%.3g fit_C=%.6g\n", report.monotone ? "yes" : "no",
                report.fit_slope, report.fit_C);
    if (!out_path.empty()) {
      namespace fs = std::filesystem;
      fs::create_directories(out_path);
      std::vector<RunRecord> ok_records;
      for (std::size_t k = 0; k < report.records.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu.json", k);
        write_file_atomic((fs::path(out_path) / name).string(),
                          record_to_json(report.records[k]));
        if (report.records[k].status == "ok") ok_records.push_back(report.records[k]);
      }
      write_file_atomic((fs::path(out_path) / "records.csv").string(), export_csv(ok_records));
    }
    return all_ok && report.monotone ? 0 : 1;
  } catch (const InvalidArgument& err) {
    std::fprintf(stderr, "invalid arguments: %s\n", err.what());
    return 2;
  } catch (const Error& err) {
    std::fprintf(stderr, "failed: %s\n", err.what());
    return 1;
  }
}

}  // namespace nodal
