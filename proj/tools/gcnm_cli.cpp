// gcnm command-line front end. Talks to the library only through gcnm.h.

#include "gcnm/gcnm.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitLibrary = 1;
constexpr int kExitSolverError = 3;

int report_failure(gcnm_status s, const std::string& context) {
  std::fprintf(stderr, "gcnm: %s: %s: %s\n", context.c_str(), gcnm_status_string(s), gcnm_last_error());
  return kExitLibrary;
}

struct ConfigFlags {
  double lambda = std::nan("");
  double sigma = std::nan("");
  double beta = std::nan("");
  double tol = std::nan("");
  int max_iter = 0;

  void attach(CLI::App* app) {
    app->add_option("--lambda", lambda, "Step size λ (default 0.99/L_f)");
    app->add_option("--sigma", sigma, "Line-search constant σ (default half its upper bound)");
    app->add_option("--beta", beta, "Backtracking factor β in (0,1) (default 0.5)");
    app->add_option("--tol", tol, "Stop when ||x - x_hat|| <= tol (default 1e-6)");
    app->add_option("--max-iter", max_iter, "Iteration cap (default 10000)");
  }

  gcnm_options options() const {
    gcnm_options o;
    gcnm_options_init(&o);
    o.lambda = lambda;
    o.sigma = sigma;
    o.beta = beta;
    o.tol = tol;
    o.max_iter = max_iter;
    return o;
  }
};

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

const char* termination_name(gcnm_termination t) {
  switch (t) {
    case GCNM_CONVERGED: return "converged";
    case GCNM_MAX_ITER: return "max_iter";
    case GCNM_ERROR: return "error";
  }
  return "?";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized coderivative-based Newton method: instance generation, solving and benchmarks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gcnm_version());

  // gen ---------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate an instance file from a key=value spec");
  std::string gen_spec, gen_out;
  long long gen_seed = -1;
  gen->add_option("spec", gen_spec, "Spec file (keys: family, n, m, mu0, mu2, nu, seed, ...)")->required();
  gen->add_option("-o,--out", gen_out, "Output instance file")->required();
  gen->add_option("--seed", gen_seed, "Override the spec's seed");

  // solve -------------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "Run one solver on an instance file");
  std::string solve_inst, solve_solver = "gcnm", solve_trace, solve_x0, solve_id;
  ConfigFlags solve_cfg;
  solve->add_option("instance", solve_inst, "Instance file written by `gen`")->required();
  solve->add_option("-s,--solver", solve_solver, "pgm | glpg | gcnm | newton")
      ->check(CLI::IsMember({"pgm", "glpg", "gcnm", "newton"}));
  solve->add_option("--trace", solve_trace, "Write per-iteration CSV here");
  solve->add_option("--x0", solve_x0, "Comma-separated start point replacing the stored one");
  solve->add_option("--id", solve_id, "Instance id for the report row (default: file path)");
  solve_cfg.attach(solve);

  // bench -------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Run a suite of instances x solvers into a CSV table");
  std::string bench_suite, bench_out;
  int bench_threads = 1;
  ConfigFlags bench_cfg;
  bench->add_option("suite", bench_suite, "Suite file")->required();
  bench->add_option("-o,--out", bench_out, "Output CSV")->required();
  bench->add_option("--threads", bench_threads, "Instances run in parallel")->check(CLI::PositiveNumber);
  bench_cfg.attach(bench);

  // deblur ------------------------------------------------------------------
  auto* deblur = app.add_subcommand("deblur", "Blur + noise a PGM image, then restore it");
  std::string db_in, db_out, db_observed, db_solver = "gcnm";
  gcnm_deblur_params db;
  gcnm_deblur_params_init(&db);
  ConfigFlags db_cfg;
  deblur->add_option("input", db_in, "Clean PGM image (P2 or P5)")->required();
  deblur->add_option("-o,--out", db_out, "Restored PGM image")->required();
  deblur->add_option("--observed", db_observed, "Also write the blurred, noisy observation");
  deblur->add_option("-s,--solver", db_solver, "pgm | glpg | gcnm | newton")
      ->check(CLI::IsMember({"pgm", "glpg", "gcnm", "newton"}));
  deblur->add_option("--kernel-size", db.kernel_size, "Odd Gaussian kernel size (default 9)");
  deblur->add_option("--kernel-std", db.kernel_std, "Gaussian kernel std (default 4)");
  deblur->add_option("--noise-std", db.noise_std, "Additive noise std (default 1e-3)");
  deblur->add_option("--mu0", db.mu0, "l0 weight (default 1e-4)");
  deblur->add_option("--mu2", db.mu2, "Ridge weight (default 5e-3)");
  deblur->add_option("--seed", db.seed, "Noise seed (default 0)");
  db_cfg.attach(deblur);

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    gcnm_instance* inst = nullptr;
    gcnm_status s = gcnm_instance_generate_file(gen_spec.c_str(), gen_seed, &inst);
    if (s != GCNM_OK) return report_failure(s, "gen");
    s = gcnm_instance_save(inst, gen_out.c_str());
    const long long n = gcnm_instance_dim(inst);
    const std::string family = gcnm_instance_family(inst);
    gcnm_instance_free(inst);
    if (s != GCNM_OK) return report_failure(s, "gen");
    std::printf("wrote %s (family=%s, n=%lld)\n", gen_out.c_str(), family.c_str(), n);
    return 0;
  }

  if (*solve) {
    gcnm_instance* inst = nullptr;
    gcnm_status s = gcnm_instance_load(solve_inst.c_str(), &inst);
    if (s != GCNM_OK) return report_failure(s, "solve");
    if (!solve_x0.empty()) {
      std::vector<double> x0;
      try {
        x0 = parse_point(solve_x0);
      } catch (const std::exception&) {
        gcnm_instance_free(inst);
        std::fprintf(stderr, "gcnm: solve: --x0 must be a comma-separated list of numbers\n");
        return kExitLibrary;
      }
      s = gcnm_instance_set_x0(inst, x0.data(), x0.size());
      if (s != GCNM_OK) {
        gcnm_instance_free(inst);
        return report_failure(s, "solve --x0");
      }
    }
    const gcnm_options opts = solve_cfg.options();
    gcnm_result* res = nullptr;
    s = gcnm_solve(inst, solve_solver.c_str(), &opts, &res);
    gcnm_instance_free(inst);
    if (s != GCNM_OK) return report_failure(s, "solve");

    if (!solve_trace.empty()) {
      s = gcnm_result_write_trace(res, solve_trace.c_str());
      if (s != GCNM_OK) {
        gcnm_result_free(res);
        return report_failure(s, "solve --trace");
      }
    }
    const std::string id = solve_id.empty() ? solve_inst : solve_id;
    std::string row(gcnm_result_report_row(res, id.c_str(), nullptr, 0), '\0');
    gcnm_result_report_row(res, id.c_str(), row.data(), row.size());
    row.pop_back();
    std::printf("%s\n%s\n", gcnm_report_header(), row.c_str());

    gcnm_report rep;
    gcnm_result_report(res, &rep);
    const std::string message = gcnm_result_message(res);
    gcnm_result_free(res);
    if (rep.termination == GCNM_ERROR) {
      std::fprintf(stderr, "gcnm: solve: %s\n", message.c_str());
      return kExitSolverError;
    }
    if (rep.termination == GCNM_MAX_ITER) std::fprintf(stderr, "gcnm: solve: %s\n", message.c_str());
    return 0;
  }

  if (*bench) {
    const gcnm_options opts = bench_cfg.options();
    size_t rows = 0;
    const gcnm_status s = gcnm_bench(bench_suite.c_str(), bench_out.c_str(), bench_threads, &opts, &rows);
    if (s != GCNM_OK) return report_failure(s, "bench");
    std::printf("wrote %zu rows to %s\n", rows, bench_out.c_str());
    return 0;
  }

  if (*deblur) {
    db.solver = db_solver.c_str();
    const gcnm_options opts = db_cfg.options();
    gcnm_deblur_report rep;
    const gcnm_status s = gcnm_deblur(db_in.c_str(), db_out.c_str(),
                                      db_observed.empty() ? nullptr : db_observed.c_str(), &db, &opts, &rep);
    if (s != GCNM_OK) return report_failure(s, "deblur");
    std::printf("solver=%s status=%s iter=%d time=%.6f eta=%.6e delta=%.6e nnz=%lld\n", db_solver.c_str(),
                termination_name(rep.run.termination), rep.run.iter, rep.run.time, rep.run.eta, rep.run.delta,
                static_cast<long long>(rep.run.nnz));
    std::printf("error_observed=%.6e error_restored=%.6e\n", rep.error_observed, rep.error_restored);
    return rep.run.termination == GCNM_ERROR ? kExitSolverError : 0;
  }
  return 0;
}
