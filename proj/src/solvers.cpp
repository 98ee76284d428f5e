#include "gcnm/solvers.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>

namespace gcnm {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iter: return "max_iter";
    case Termination::error: return "error";
  }
  return "?";
}

const char* to_string(DirectionStrategy s) {
  switch (s) {
    case DirectionStrategy::zero: return "zero";
    case DirectionStrategy::l0_newton: return "l0_newton";
    case DirectionStrategy::generic_newton: return "generic_newton";
    case DirectionStrategy::custom: return "custom";
  }
  return "?";
}

int SolveTrace::iterations() const {
  return records.empty() ? 0 : static_cast<int>(records.size()) - 1;
}

namespace {

using Clock = std::chrono::steady_clock;

// Forwarding wrappers that count oracle calls for SolveTotals.
class CountingSmooth final : public SmoothModel {
 public:
  CountingSmooth(const SmoothModel& f, SolveTotals& t) : f_(f), t_(t) {}
  Index dim() const override { return f_.dim(); }
  double value(const Vec& x) const override {
    ++t_.value_evals;
    return f_.value(x);
  }
  Vec gradient(const Vec& x) const override {
    ++t_.gradient_evals;
    return f_.gradient(x);
  }
  double value_and_gradient(const Vec& x, Vec& g) const override {
    ++t_.value_evals;
    ++t_.gradient_evals;
    return f_.value_and_gradient(x, g);
  }
  Vec hessian_apply(const Vec& x, const Vec& w) const override {
    ++t_.hessian_applies;
    return f_.hessian_apply(x, w);
  }
  Mat restricted_hessian(const Vec& x, const std::vector<Index>& idx) const override {
    ++t_.restricted_hessians;
    return f_.restricted_hessian(x, idx);
  }
  double lipschitz() const override { return f_.lipschitz(); }
  std::optional<double> data_residual(const Vec& x) const override { return f_.data_residual(x); }
  std::string name() const override { return f_.name(); }

 private:
  const SmoothModel& f_;
  SolveTotals& t_;
};

class CountingReg final : public Regularizer {
 public:
  CountingReg(const Regularizer& g, SolveTotals& t) : g_(g), t_(t) {}
  double value(const Vec& x) const override { return g_.value(x); }
  Vec prox(const Vec& z, double lambda) const override {
    ++t_.prox_evals;
    return g_.prox(z, lambda);
  }
  bool is_subgradient(const Vec& x, const Vec& v, double tol) const override {
    return g_.is_subgradient(x, v, tol);
  }
  double prox_threshold() const override { return g_.prox_threshold(); }
  std::optional<std::vector<Index>> newton_free_set(const Vec& x_hat) const override {
    return g_.newton_free_set(x_hat);
  }
  std::optional<Vec> prox_jacobian(const Vec& z, double lambda) const override {
    return g_.prox_jacobian(z, lambda);
  }
  bool near_prox_tie(const Vec& z, double lambda, double rel) const override {
    return g_.near_prox_tie(z, lambda, rel);
  }
  std::string name() const override { return g_.name(); }

 private:
  const Regularizer& g_;
  SolveTotals& t_;
};

CompositeProblem counted(const CompositeProblem& p, SolveTotals& totals) {
  return CompositeProblem(std::make_shared<CountingSmooth>(p.smooth(), totals),
                          std::make_shared<CountingReg>(p.reg(), totals));
}

void validate(const CompositeProblem& problem, const SolverConfig& c, const Vec& x0) {
  require_same_size(problem.dim(), x0.size(), "solver: x0");
  ConfigOverrides o;
  o.lambda = c.lambda;
  o.sigma = c.sigma;
  o.beta = c.beta;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.max_backtracks = c.max_backtracks;
  make_config(problem, o);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool finite_point(const FbePoint& p) {
  return std::isfinite(p.fbe) && p.x_hat.allFinite() && p.grad.allFinite();
}

IterationRecord make_record(int k, const FbePoint& p, const ProxGradResult& r, bool keep) {
  IterationRecord rec;
  rec.k = k;
  rec.fbe = r.fbe;
  rec.eta = r.eta;
  rec.v_norm = r.v_norm;
  if (keep) {
    rec.x = p.x;
    rec.x_hat = r.x_hat;
    rec.v_hat = r.v_hat;
  }
  return rec;
}

NewtonDirectionOutcome compute_direction(DirectionStrategy strategy, const SolveOptions& opts,
                                         const DirectionContext& ctx) {
  const CompositeProblem& problem = ctx.problem;
  switch (strategy) {
    case DirectionStrategy::zero: {
      NewtonDirectionOutcome out;
      out.d = Vec::Zero(ctx.x.size());
      return out;
    }
    case DirectionStrategy::l0_newton: {
      const auto free_set = problem.reg().newton_free_set(ctx.step.x_hat);
      if (!free_set) {
        throw Unsupported(fmt::format("direction strategy unsupported: regularizer '{}' has no free set",
                                      problem.reg().name()));
      }
      return reduced_newton_direction(*free_set, ctx.step.v_hat,
                                      hessian_at(problem.smooth(), ctx.step.x_hat), opts.direction);
    }
    case DirectionStrategy::generic_newton:
      return generic_newton_direction(ctx.step.x_hat, ctx.step.v_hat, problem, ctx.config.lambda,
                                      opts.direction, &ctx.step.grad_hat);
    case DirectionStrategy::custom:
      if (!opts.custom) throw InvalidArgument("custom direction strategy without a hook");
      return opts.custom(ctx);
  }
  throw InvalidArgument("unknown direction strategy");
}

}  // namespace

DirectionStrategy default_newton_strategy(const Regularizer& g) {
  if (g.newton_free_set(Vec::Zero(0))) return DirectionStrategy::l0_newton;
  if (g.prox_jacobian(Vec::Zero(0), 1.0)) return DirectionStrategy::generic_newton;
  throw Unsupported(fmt::format("direction strategy unsupported: regularizer '{}' has no Newton structure",
                                g.name()));
}

SolveTrace solve_glpg(const CompositeProblem& original, const SolverConfig& config, const Vec& x0,
                      const SolveOptions& options) {
  validate(original, config, x0);
  SolveTrace trace;
  trace.config = config;
  const CompositeProblem problem = counted(original, trace.totals);
  const double lambda = config.lambda;
  const auto t0 = Clock::now();

  auto finish = [&](Termination t, std::string msg, Vec x) {
    trace.termination = t;
    trace.message = std::move(msg);
    trace.final_x = std::move(x);
    trace.totals.time_s = seconds_since(t0);
    return trace;
  };

  if (!x0.allFinite()) {
    IterationRecord rec;
    rec.fbe = std::numeric_limits<double>::quiet_NaN();
    rec.eta = rec.v_norm = rec.fbe;
    trace.records.push_back(rec);
    return finish(Termination::error, "x0 contains NaN or Inf", x0);
  }

  FbePoint point = evaluate_fbe_point(x0, problem, lambda);
  for (int k = 0;; ++k) {
    if (!finite_point(point)) {
      IterationRecord rec;
      rec.k = k;
      rec.fbe = point.fbe;
      rec.eta = rec.v_norm = std::numeric_limits<double>::quiet_NaN();
      rec.elapsed = seconds_since(t0);
      trace.records.push_back(rec);
      return finish(Termination::error, fmt::format("non-finite state at iteration {}", k), point.x);
    }
    const ProxGradResult step = complete_step(point, problem, lambda);
    IterationRecord rec = make_record(k, point, step, options.keep_iterates);

    if (step.eta <= config.tol) {
      rec.elapsed = seconds_since(t0);
      trace.records.push_back(std::move(rec));
      return finish(Termination::converged, "", point.x);
    }
    if (k >= config.max_iter) {
      rec.elapsed = seconds_since(t0);
      trace.records.push_back(std::move(rec));
      return finish(Termination::max_iter, fmt::format("reached max_iter={}", config.max_iter), point.x);
    }

    const DirectionContext ctx{k, point.x, step, problem, config};
    NewtonDirectionOutcome dir = compute_direction(options.strategy, options, ctx);
    if (options.strategy == DirectionStrategy::zero) {
      rec.direction = DirectionStatus::none;
    } else {
      rec.direction = dir.status;
      if (dir.status == DirectionStatus::fallback_zero) ++trace.totals.direction_fallbacks;
    }
    const bool zero_dir = dir.d.size() == 0 || dir.d.isZero(0.0);
    if (!zero_dir) require_same_size(problem.dim(), dir.d.size(), "direction");

    const double target = step.fbe - config.sigma * step.v_norm * step.v_norm;
    double tau = 1.0;
    int backtracks = 0;
    FbePoint next;
    bool accepted = false;
    if (zero_dir) {
      // Every tau gives the same trial point x_hat.
      next = evaluate_fbe_point(step.x_hat, problem, lambda);
      accepted = next.fbe <= target;
    } else {
      while (true) {
        next = evaluate_fbe_point(step.x_hat + tau * dir.d, problem, lambda);
        if (next.fbe <= target) {
          accepted = true;
          break;
        }
        if (backtracks >= config.max_backtracks - 1) break;
        tau *= config.beta;
        ++backtracks;
      }
      if (!accepted) {
        ++backtracks;
        next = evaluate_fbe_point(step.x_hat, problem, lambda);
      }
    }
    if (!accepted) {
      rec.took_prox_fallback = true;
      ++trace.totals.prox_fallbacks;
      tau = 0.0;
    }
    rec.tau = tau;
    rec.backtracks = backtracks;
    trace.totals.backtracks += backtracks;
    if (options.keep_iterates) rec.d = zero_dir ? Vec::Zero(problem.dim()) : dir.d;
    rec.elapsed = seconds_since(t0);
    trace.records.push_back(std::move(rec));
    point = std::move(next);
  }
}

SolveTrace solve_gcnm(const CompositeProblem& problem, const SolverConfig& config, const Vec& x0,
                      SolveOptions options) {
  options.strategy = default_newton_strategy(problem.reg());
  return solve_glpg(problem, config, x0, options);
}

SolveTrace solve_pure_newton(const CompositeProblem& original, const SolverConfig& config,
                             const Vec& x0, SolveOptions options) {
  validate(original, config, x0);
  if (options.strategy == DirectionStrategy::zero) {
    options.strategy = default_newton_strategy(original.reg());
  }
  SolveTrace trace;
  trace.config = config;
  const CompositeProblem problem = counted(original, trace.totals);
  const double lambda = config.lambda;
  const auto t0 = Clock::now();

  auto finish = [&](Termination t, std::string msg, Vec x) {
    trace.termination = t;
    trace.message = std::move(msg);
    trace.final_x = std::move(x);
    trace.totals.time_s = seconds_since(t0);
    return trace;
  };

  Vec x = x0;
  for (int k = 0;; ++k) {
    const FbePoint point = evaluate_fbe_point(x, problem, lambda);
    if (!x.allFinite() || !finite_point(point)) {
      IterationRecord rec;
      rec.k = k;
      rec.fbe = point.fbe;
      rec.eta = rec.v_norm = std::numeric_limits<double>::quiet_NaN();
      rec.elapsed = seconds_since(t0);
      trace.records.push_back(rec);
      return finish(Termination::error, fmt::format("non-finite state at iteration {}", k), x);
    }
    const ProxGradResult step = complete_step(point, problem, lambda);
    IterationRecord rec = make_record(k, point, step, options.keep_iterates);
    if (step.eta <= config.tol) {
      rec.elapsed = seconds_since(t0);
      trace.records.push_back(std::move(rec));
      return finish(Termination::converged, "", x);
    }
    if (k >= config.max_iter) {
      rec.elapsed = seconds_since(t0);
      trace.records.push_back(std::move(rec));
      return finish(Termination::max_iter, fmt::format("reached max_iter={}", config.max_iter), x);
    }
    const DirectionContext ctx{k, x, step, problem, config};
    const NewtonDirectionOutcome dir = compute_direction(options.strategy, options, ctx);
    rec.direction = dir.status;
    rec.tau = 1.0;
    if (options.keep_iterates) rec.d = dir.d;
    rec.elapsed = seconds_since(t0);
    trace.records.push_back(std::move(rec));
    if (dir.status == DirectionStatus::fallback_zero && step.v_norm != 0.0) {
      ++trace.totals.direction_fallbacks;
      return finish(Termination::error, fmt::format("Newton step unavailable at iteration {}", k), x);
    }
    x = step.x_hat + dir.d;
  }
}

SolveTrace solve_pgm(const CompositeProblem& original, const SolverConfig& config, const Vec& x0,
                     bool keep_iterates) {
  validate(original, config, x0);
  SolveTrace trace;
  trace.config = config;
  const CompositeProblem problem = counted(original, trace.totals);
  const SmoothModel& f = problem.smooth();
  const Regularizer& g = problem.reg();
  const double lambda = config.lambda;
  const auto t0 = Clock::now();

  auto finish = [&](Termination t, std::string msg, Vec x) {
    trace.termination = t;
    trace.message = std::move(msg);
    trace.final_x = std::move(x);
    trace.totals.time_s = seconds_since(t0);
    return trace;
  };

  // grad f(x^{k+1}) = grad f(x_hat^k) is needed both for v_hat^k and for the
  // next step, so it is computed once and carried over.
  Vec x = x0;
  Vec grad;
  double fx = f.value_and_gradient(x, grad);
  for (int k = 0;; ++k) {
    const Vec x_hat = g.prox(x - lambda * grad, lambda);
    const Vec diff = x_hat - x;
    const double eta = diff.norm();
    Vec grad_hat;
    const double f_hat = f.value_and_gradient(x_hat, grad_hat);

    IterationRecord rec;
    rec.k = k;
    rec.eta = eta;
    rec.fbe = fx + grad.dot(diff) + g.value(x_hat) + diff.squaredNorm() / (2.0 * lambda);
    const Vec v_hat = grad_hat - grad - diff / lambda;
    rec.v_norm = v_hat.norm();
    if (keep_iterates) {
      rec.x = x;
      rec.x_hat = x_hat;
      rec.v_hat = v_hat;
    }
    rec.elapsed = seconds_since(t0);

    if (!std::isfinite(rec.fbe) || !x_hat.allFinite() || !grad_hat.allFinite()) {
      rec.eta = rec.v_norm = std::numeric_limits<double>::quiet_NaN();
      trace.records.push_back(std::move(rec));
      return finish(Termination::error, fmt::format("non-finite state at iteration {}", k), x);
    }
    if (eta <= config.tol) {
      trace.records.push_back(std::move(rec));
      return finish(Termination::converged, "", x);
    }
    if (k >= config.max_iter) {
      trace.records.push_back(std::move(rec));
      return finish(Termination::max_iter, fmt::format("reached max_iter={}", config.max_iter), x);
    }
    rec.tau = 1.0;
    if (keep_iterates) rec.d = Vec::Zero(x.size());
    trace.records.push_back(std::move(rec));
    x = x_hat;
    grad = std::move(grad_hat);
    fx = f_hat;
  }
}

CriticalityReport criticality_report(const Vec& x, const CompositeProblem& problem, double lambda) {
  const ProxGradResult r = prox_grad_step(x, problem, lambda);
  CriticalityReport out;
  out.eta = r.eta;
  out.v_norm = r.v_norm;
  // Normal map at z = x - lambda grad f(x): grad f(prox z) + (z - prox z) / lambda.
  const Vec z = x - lambda * problem.smooth().gradient(x);
  out.normal_map_norm = (r.grad_hat + (z - r.x_hat) / lambda).norm();
  out.consistent = r.v_norm <= (1.0 / lambda + problem.lipschitz()) * r.eta + 1e-9;
  return out;
}

}  // namespace gcnm
