#include "gcnm/core.hpp"

#include "gcnm/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace gcnm {

bool all_finite(const Vec& v) { return v.allFinite(); }

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(fmt::format("{} contains NaN or Inf", what));
}

void require_same_size(Index a, Index b, const char* what) {
  if (a != b) throw DimensionMismatch(fmt::format("{}: expected size {}, got {}", what, a, b));
}

Mat LinearOperator::to_dense() const {
  Mat out(rows(), cols());
  Vec e = Vec::Zero(cols());
  for (Index j = 0; j < cols(); ++j) {
    e[j] = 1.0;
    out.col(j) = apply(e);
    e[j] = 0.0;
  }
  return out;
}

AdjointReport validate_operator_adjoint(const LinearOperator& op, int probes,
                                        std::uint64_t seed, double tolerance) {
  if (probes < 1) throw InvalidArgument("validate_operator_adjoint: probes must be >= 1");
  AdjointReport report;
  report.probes = probes;
  report.tolerance = tolerance;
  Rng rng(seed);
  for (int p = 0; p < probes; ++p) {
    Vec u(op.cols()), w(op.rows());
    for (Index i = 0; i < u.size(); ++i) u[i] = rng.normal();
    for (Index i = 0; i < w.size(); ++i) w[i] = rng.normal();
    if (u.norm() > 0) u.normalize();
    if (w.norm() > 0) w.normalize();
    const Vec au = op.apply(u);
    const Vec atw = op.apply_adjoint(w);
    const double lhs = au.dot(w);
    const double rhs = u.dot(atw);
    const double scale = au.norm() * w.norm() + u.norm() * atw.norm();
    const double defect = scale > 0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
    report.max_defect = std::max(report.max_defect, defect);
  }
  report.passed = report.max_defect <= tolerance;
  return report;
}

double dense_consistency_defect(const LinearOperator& op) {
  const Mat dense = op.to_dense();
  double worst = 0.0;
  Vec e = Vec::Zero(op.cols());
  for (Index j = 0; j < op.cols(); ++j) {
    e[j] = 1.0;
    const Vec col = op.apply(e);
    e[j] = 0.0;
    for (Index i = 0; i < op.rows(); ++i) {
      const double gap = std::abs(col[i] - dense(i, j)) / (1.0 + std::abs(col[i]));
      worst = std::max(worst, gap);
    }
  }
  return worst;
}

Mat SmoothModel::restricted_hessian(const Vec& x, const std::vector<Index>& idx) const {
  const Index k = static_cast<Index>(idx.size());
  Mat h(k, k);
  Vec e = Vec::Zero(dim());
  for (Index c = 0; c < k; ++c) {
    e[idx[c]] = 1.0;
    const Vec col = hessian_apply(x, e);
    e[idx[c]] = 0.0;
    for (Index r = 0; r < k; ++r) h(r, c) = col[idx[r]];
  }
  return h;
}

CompositeProblem::CompositeProblem(std::shared_ptr<const SmoothModel> f,
                                   std::shared_ptr<const Regularizer> g)
    : f_(std::move(f)), g_(std::move(g)) {
  if (!f_ || !g_) throw InvalidArgument("CompositeProblem needs both a smooth model and a regularizer");
  lipschitz_ = f_->lipschitz();
}

double sigma_upper_bound(double lambda, double lipschitz) {
  const double t = lambda * lipschitz;
  return lambda * (1.0 - t) / (2.0 * (1.0 + t) * (1.0 + t));
}

SolverConfig make_config(const CompositeProblem& problem, const ConfigOverrides& overrides) {
  return make_config(problem.lipschitz(), problem.reg().prox_threshold(), overrides);
}

SolverConfig make_config(double lipschitz, double lambda_g, const ConfigOverrides& o) {
  if (!std::isfinite(lipschitz) || !(lipschitz > 0.0)) {
    throw ConfigError(fmt::format("L_f must be finite and > 0 (got {})", lipschitz));
  }
  const double inv_l = 1.0 / lipschitz;
  const double cap = std::min(inv_l, lambda_g);

  SolverConfig c;
  c.lambda = o.lambda.value_or(0.99 * cap);
  if (!std::isfinite(c.lambda) || !(c.lambda > 0.0)) {
    throw ConfigError(fmt::format("lambda={} violates λ > 0", c.lambda));
  }
  if (c.lambda >= inv_l) {
    throw ConfigError(fmt::format("lambda={} violates λ ≥ 1/L_f (1/L_f = {})", c.lambda, inv_l));
  }
  if (c.lambda >= lambda_g) {
    throw ConfigError(fmt::format("lambda={} violates λ ≥ λ_g (λ_g = {})", c.lambda, lambda_g));
  }

  const double sigma_ub = sigma_upper_bound(c.lambda, lipschitz);
  c.sigma = o.sigma.value_or(0.5 * sigma_ub);
  if (!std::isfinite(c.sigma) || !(c.sigma > 0.0)) {
    throw ConfigError(fmt::format("sigma={} violates σ > 0", c.sigma));
  }
  if (c.sigma >= sigma_ub) {
    throw ConfigError(fmt::format(
        "sigma={} violates σ ≥ λ(1−λL_f)/(2(1+λL_f)²) (bound = {})", c.sigma, sigma_ub));
  }

  c.beta = o.beta.value_or(0.5);
  if (!(c.beta > 0.0 && c.beta < 1.0)) {
    throw ConfigError(fmt::format("beta={} violates β ∈ (0,1)", c.beta));
  }
  c.tol = o.tol.value_or(1e-6);
  if (!std::isfinite(c.tol) || c.tol < 0.0) {
    throw ConfigError(fmt::format("tol={} must be finite and >= 0", c.tol));
  }
  c.max_iter = o.max_iter.value_or(10000);
  if (c.max_iter < 1) throw ConfigError(fmt::format("max_iter={} must be >= 1", c.max_iter));
  c.max_backtracks = o.max_backtracks.value_or(50);
  if (c.max_backtracks < 1) {
    throw ConfigError(fmt::format("max_backtracks={} must be >= 1", c.max_backtracks));
  }
  return c;
}

const char* to_string(DirectionStatus s) {
  switch (s) {
    case DirectionStatus::none: return "none";
    case DirectionStatus::solved: return "solved";
    case DirectionStatus::fallback_zero: return "fallback_zero";
  }
  return "?";
}

}  // namespace gcnm
