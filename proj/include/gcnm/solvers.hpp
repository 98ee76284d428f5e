#pragma once

#include "gcnm/core.hpp"
#include "gcnm/directions.hpp"
#include "gcnm/envelopes.hpp"

#include <functional>

namespace gcnm {

enum class Termination { converged, max_iter, error };
const char* to_string(Termination t);

/// How GLPG picks d^k.
///   zero           : d = 0, GLPG becomes PGM
///   l0_newton      : reduced Newton system on the regularizer's free set
///                    (the support of x_hat for l0)
///   generic_newton : prox-Jacobian Newton system
///   custom         : caller hook
enum class DirectionStrategy { zero, l0_newton, generic_newton, custom };
const char* to_string(DirectionStrategy s);

struct DirectionContext {
  int k = 0;
  const Vec& x;
  const ProxGradResult& step;
  const CompositeProblem& problem;
  const SolverConfig& config;
};

using DirectionHook = std::function<NewtonDirectionOutcome(const DirectionContext&)>;

struct SolveOptions {
  DirectionStrategy strategy = DirectionStrategy::zero;
  DirectionHook custom;
  DirectionOptions direction;
  /// Store x, x_hat, v_hat and d in every record (memory grows with n * iter).
  bool keep_iterates = false;
};

struct SolveTotals {
  double time_s = 0.0;
  long long value_evals = 0;
  long long gradient_evals = 0;
  long long prox_evals = 0;
  long long hessian_applies = 0;
  long long restricted_hessians = 0;
  long long backtracks = 0;
  long long direction_fallbacks = 0;
  long long prox_fallbacks = 0;
};

struct SolveTrace {
  std::vector<IterationRecord> records;
  Termination termination = Termination::error;
  std::string message;
  Vec final_x;
  SolverConfig config;
  SolveTotals totals;

  /// Iterations taken: every record but the last is one step.
  int iterations() const;
  const IterationRecord& last() const { return records.back(); }
};

/// Generalized line-search proximal gradient method with a pluggable direction.
/// Throws ConfigError if `config` is invalid for the problem.
SolveTrace solve_glpg(const CompositeProblem& problem, const SolverConfig& config, const Vec& x0,
                      const SolveOptions& options = {});

/// GLPG with the Newton direction matching the regularizer: l0_newton when it
/// exposes a free set, generic_newton when it exposes a prox Jacobian.
SolveTrace solve_gcnm(const CompositeProblem& problem, const SolverConfig& config, const Vec& x0,
                      SolveOptions options = {});

/// Full Newton steps x^{k+1} = x_hat^k + d^k without line search. A failed
/// direction with v_hat != 0 ends the run with termination error.
SolveTrace solve_pure_newton(const CompositeProblem& problem, const SolverConfig& config,
                             const Vec& x0, SolveOptions options = {});

/// Plain x^{k+1} = Prox_{lambda g}(x^k - lambda grad f(x^k)), coded directly.
SolveTrace solve_pgm(const CompositeProblem& problem, const SolverConfig& config, const Vec& x0,
                     bool keep_iterates = false);

/// Newton strategy GCNM would pick for this regularizer.
DirectionStrategy default_newton_strategy(const Regularizer& g);

struct CriticalityReport {
  double eta = 0.0;
  double v_norm = 0.0;
  double normal_map_norm = 0.0;
  bool consistent = false;  ///< ||v_hat|| <= (1/lambda + L_f) eta (+1e-9 slack)
};

CriticalityReport criticality_report(const Vec& x, const CompositeProblem& problem, double lambda);

}  // namespace gcnm
