#pragma once

#include "gcnm/instances.hpp"
#include "gcnm/solvers.hpp"

#include <string>
#include <vector>

namespace gcnm {

enum class SolverKind { pgm, glpg, gcnm, newton };

const char* to_string(SolverKind s);
/// Accepts pgm, glpg, gcnm, newton. Throws InvalidArgument otherwise.
SolverKind solver_from_string(const std::string& s);

/// One table row. delta is ||Ax - b|| (NaN when the model has no data term);
/// status is converged, max_iter or error.
struct RunReport {
  std::string instance;
  std::string solver;
  double time = 0.0;
  int iter = 0;
  double delta = 0.0;
  double eta = 0.0;
  Index nnz = 0;
  std::string status;
  std::string message;  ///< not part of the CSV
};

struct RunOutcome {
  RunReport report;
  SolveTrace trace;
};

/// Validates the config against the problem and runs one solver. `glpg` is
/// GLPG with the zero direction.
RunOutcome run_solver(const CompositeProblem& problem, const Vec& x0, SolverKind solver,
                      const ConfigOverrides& overrides, const std::string& instance_id = "",
                      bool keep_iterates = false);

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kReportHeader = "TN,solver,time,iter,delta,eta,nnz,status";
inline constexpr const char* kTraceHeader = "k,fbe,eta,v_norm,tau,backtracks,elapsed_s";

std::string report_csv_row(const RunReport& r);
std::string reports_to_csv(const std::vector<RunReport>& rows);
/// Inverse of reports_to_csv. Throws ParseError with the byte offset of the bad row.
std::vector<RunReport> parse_reports_csv(const std::string& text);

std::string trace_to_csv(const SolveTrace& trace);

// ---------------------------------------------------------------------------
// Suites
//
//   # comment
//   solvers = gcnm, pgm        (global, default gcnm,pgm)
//   tol = 1e-6                 (global overrides: tol, max_iter, lambda, sigma, beta)
//   [TN1]
//   family = l0l2
//   m = 20
//   ...
//
// Each [name] section is an instance spec (see InstanceSpec).

struct SuiteEntry {
  std::string name;
  std::string spec_text;
};

struct Suite {
  std::vector<SolverKind> solvers{SolverKind::gcnm, SolverKind::pgm};
  ConfigOverrides overrides;
  std::vector<SuiteEntry> entries;
};

Suite parse_suite(const std::string& text);

/// One row per (instance, solver), ordered by instance then solver. An
/// instance that fails to generate gives status=error rows and the others
/// proceed. `threads` > 1 runs instances in parallel; each run stays
/// single-threaded so results do not depend on the thread count.
std::vector<RunReport> run_suite(const Suite& suite, int threads = 1,
                                 const ConfigOverrides& extra = {});

// ---------------------------------------------------------------------------
// Deblurring

struct DeblurParams {
  int kernel_size = 9;
  double kernel_std = 4.0;
  double noise_std = 1e-3;
  double mu0 = 1e-4;
  double mu2 = 5e-3;
  std::uint64_t seed = 0;
  SolverKind solver = SolverKind::gcnm;
  ConfigOverrides overrides;
};

struct DeblurResult {
  RunReport report;
  GrayImage observed;
  GrayImage restored;  ///< unclamped; encode_pgm clamps on output
  double error_observed = 0.0;  ///< ||b - x_true||
  double error_restored = 0.0;  ///< ||x - x_true||
};

DeblurResult run_deblur(const GrayImage& truth, const DeblurParams& params,
                        const std::string& instance_id = "deblur");

}  // namespace gcnm
