#include "gcnm/directions.hpp"

#include "gcnm/regularizers.hpp"

#include <fmt/format.h>

#include <Eigen/LU>

#include <cmath>

namespace gcnm {

namespace {

NewtonDirectionOutcome fallback(NewtonDirectionOutcome out, Index n) {
  out.d = Vec::Zero(n);
  out.status = DirectionStatus::fallback_zero;
  return out;
}

Mat probe_block(const HessianAccess& hess, const std::vector<Index>& idx, Index n) {
  const Index k = static_cast<Index>(idx.size());
  Mat h(k, k);
  Vec e = Vec::Zero(n);
  for (Index c = 0; c < k; ++c) {
    e[idx[c]] = 1.0;
    const Vec col = hess.apply(e);
    e[idx[c]] = 0.0;
    for (Index r = 0; r < k; ++r) h(r, c) = col[idx[r]];
  }
  return h;
}

// Conjugate gradient on H_JJ y = rhs using the full-space action with the
// off-J coordinates held at zero.
struct CgResult {
  Vec y;
  int iterations = 0;
  bool ok = false;
};

CgResult masked_cg(const HessianAccess& hess, const std::vector<Index>& idx, const Vec& rhs,
                   Index n, double tol, int max_iter) {
  const Index k = static_cast<Index>(idx.size());
  Vec full = Vec::Zero(n);
  auto op = [&](const Vec& w) {
    for (Index i = 0; i < k; ++i) full[idx[i]] = w[i];
    const Vec hw = hess.apply(full);
    Vec out(k);
    for (Index i = 0; i < k; ++i) out[i] = hw[idx[i]];
    return out;
  };

  CgResult res;
  res.y = Vec::Zero(k);
  Vec r = rhs;
  Vec p = r;
  double rr = r.squaredNorm();
  const double stop = tol * rhs.norm();
  if (std::sqrt(rr) <= stop) {
    res.ok = true;
    return res;
  }
  for (int it = 1; it <= max_iter; ++it) {
    const Vec hp = op(p);
    const double php = p.dot(hp);
    if (!std::isfinite(php) || std::abs(php) <= 1e-300 * p.squaredNorm()) return res;
    const double alpha = rr / php;
    res.y += alpha * p;
    r -= alpha * hp;
    const double rr_new = r.squaredNorm();
    res.iterations = it;
    if (!std::isfinite(rr_new)) return res;
    if (std::sqrt(rr_new) <= stop) {
      res.ok = true;
      return res;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return res;
}

}  // namespace

HessianAccess hessian_at(const SmoothModel& f, const Vec& x) {
  HessianAccess h;
  h.apply = [&f, x](const Vec& w) { return f.hessian_apply(x, w); };
  h.restricted = [&f, x](const std::vector<Index>& idx) { return f.restricted_hessian(x, idx); };
  return h;
}

NewtonDirectionOutcome reduced_newton_direction(const std::vector<Index>& free_set,
                                                const Vec& v_hat, const HessianAccess& hess,
                                                const DirectionOptions& opts) {
  const Index n = v_hat.size();
  NewtonDirectionOutcome out;
  out.support = free_set;
  out.d = Vec::Zero(n);
  const Index k = static_cast<Index>(free_set.size());
  if (k == 0) return out;

  Vec rhs(k);
  for (Index i = 0; i < k; ++i) {
    if (free_set[i] < 0 || free_set[i] >= n) {
      throw InvalidArgument(fmt::format("Newton direction: index {} out of range [0, {})", free_set[i], n));
    }
    rhs[i] = -v_hat[free_set[i]];
  }
  if (rhs.squaredNorm() == 0.0) return out;

  const double accept = opts.linsolve_tol * (1.0 + v_hat.norm());

  if (k <= opts.dense_limit) {
    const Mat h = hess.restricted ? hess.restricted(free_set) : probe_block(hess, free_set, n);
    if (!h.allFinite()) return fallback(out, n);
    Eigen::FullPivLU<Mat> lu(h);
    if (!lu.isInvertible()) return fallback(out, n);
    const Vec y = lu.solve(rhs);
    out.residual = (h * y - rhs).norm();
    if (!y.allFinite() || out.residual > accept) return fallback(out, n);
    for (Index i = 0; i < k; ++i) out.d[free_set[i]] = y[i];
    return out;
  }

  out.used_cg = true;
  const CgResult cg = masked_cg(hess, free_set, rhs, n, opts.linsolve_tol,
                                opts.cg_iteration_factor * static_cast<int>(k));
  out.cg_iterations = cg.iterations;
  if (!cg.ok) return fallback(out, n);
  for (Index i = 0; i < k; ++i) out.d[free_set[i]] = cg.y[i];
  // True residual; the CG recursion can drift from it.
  const Vec hd = hess.apply(out.d);
  double res2 = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double e = hd[free_set[i]] - rhs[i];
    res2 += e * e;
  }
  out.residual = std::sqrt(res2);
  if (out.residual > accept) return fallback(out, n);
  return out;
}

NewtonDirectionOutcome l0_newton_direction(const Vec& x_hat, const Vec& v_hat,
                                           const HessianAccess& hess,
                                           const DirectionOptions& opts) {
  require_same_size(x_hat.size(), v_hat.size(), "l0_newton_direction");
  return reduced_newton_direction(support_of(x_hat), v_hat, hess, opts);
}

NewtonDirectionOutcome generic_newton_direction(const Vec& x_hat, const Vec& v_hat,
                                                const CompositeProblem& problem, double lambda,
                                                const DirectionOptions& opts,
                                                const Vec* grad_hat) {
  const Index n = problem.dim();
  require_same_size(n, x_hat.size(), "generic_newton_direction: x_hat");
  require_same_size(n, v_hat.size(), "generic_newton_direction: v_hat");
  if (n > opts.generic_dense_limit) {
    throw Unsupported(fmt::format("direction strategy unsupported: n={} exceeds dense limit {}",
                                  n, opts.generic_dense_limit));
  }
  const Vec g_hat = grad_hat ? *grad_hat : problem.smooth().gradient(x_hat);
  const Vec z = x_hat + lambda * (v_hat - g_hat);
  const std::optional<Vec> jac = problem.reg().prox_jacobian(z, lambda);
  if (!jac) {
    throw Unsupported(fmt::format("direction strategy unsupported: regularizer '{}' has no prox Jacobian",
                                  problem.reg().name()));
  }
  const Vec& a = *jac;

  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  const Mat h = problem.smooth().restricted_hessian(x_hat, all);

  Mat m = lambda * a.asDiagonal() * h;
  m.diagonal() += Vec::Ones(n) - a;
  const Vec rhs = -lambda * a.cwiseProduct(v_hat);

  NewtonDirectionOutcome out;
  for (Index i = 0; i < n; ++i) {
    if (a[i] != 0.0) out.support.push_back(i);
  }
  out.d = Vec::Zero(n);
  if (rhs.squaredNorm() == 0.0) return out;
  if (!m.allFinite()) return fallback(out, n);
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) return fallback(out, n);
  const Vec d = lu.solve(rhs);
  out.residual = (m * d - rhs).norm();
  if (!d.allFinite() || out.residual > opts.linsolve_tol * (1.0 + v_hat.norm())) {
    return fallback(out, n);
  }
  out.d = d;
  return out;
}

}  // namespace gcnm
