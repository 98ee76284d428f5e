#include "gcnm/envelopes.hpp"

#include <algorithm>

namespace gcnm {

FbePoint evaluate_fbe_point(const Vec& x, const CompositeProblem& problem, double lambda) {
  require_same_size(problem.dim(), x.size(), "evaluate_fbe_point");
  FbePoint p;
  p.x = x;
  p.fx = problem.smooth().value_and_gradient(x, p.grad);
  p.z = x - lambda * p.grad;
  p.x_hat = problem.reg().prox(p.z, lambda);
  p.g_hat = problem.reg().value(p.x_hat);
  const Vec diff = p.x_hat - x;
  p.fbe = p.fx + p.grad.dot(diff) + p.g_hat + diff.squaredNorm() / (2.0 * lambda);
  return p;
}

ProxGradResult complete_step(const FbePoint& p, const CompositeProblem& problem, double lambda) {
  ProxGradResult r;
  r.x_hat = p.x_hat;
  r.grad_hat = problem.smooth().gradient(p.x_hat);
  r.v_hat = r.grad_hat - p.grad + (p.x - p.x_hat) / lambda;
  r.eta = (p.x - p.x_hat).norm();
  r.v_norm = r.v_hat.norm();
  r.fbe = p.fbe;
  return r;
}

ProxGradResult prox_grad_step(const Vec& x, const CompositeProblem& problem, double lambda) {
  return complete_step(evaluate_fbe_point(x, problem, lambda), problem, lambda);
}

double fbe_value(const Vec& x, const Vec& x_hat, const CompositeProblem& problem, double lambda) {
  require_same_size(x.size(), x_hat.size(), "fbe_value");
  Vec grad;
  const double fx = problem.smooth().value_and_gradient(x, grad);
  const Vec diff = x_hat - x;
  return fx + grad.dot(diff) + problem.reg().value(x_hat) + diff.squaredNorm() / (2.0 * lambda);
}

double moreau_envelope(const Vec& z, const Regularizer& g, double lambda) {
  const Vec p = g.prox(z, lambda);
  return g.value(p) + (p - z).squaredNorm() / (2.0 * lambda);
}

double fbe_value_via_moreau(const Vec& x, const CompositeProblem& problem, double lambda) {
  Vec grad;
  const double fx = problem.smooth().value_and_gradient(x, grad);
  return fx - 0.5 * lambda * grad.squaredNorm() +
         moreau_envelope(x - lambda * grad, problem.reg(), lambda);
}

FbeGradient fbe_gradient(const Vec& x, const CompositeProblem& problem, double lambda) {
  require_same_size(problem.dim(), x.size(), "fbe_gradient");
  const Vec grad = problem.smooth().gradient(x);
  const Vec z = x - lambda * grad;
  const Vec r = x - problem.reg().prox(z, lambda);
  FbeGradient out;
  out.gradient = r / lambda - problem.smooth().hessian_apply(x, r);
  out.near_tie = problem.reg().near_prox_tie(z, lambda, kTieRelTol);
  return out;
}

double sandwich_violation(const ProxGradResult& r, double lipschitz, double lambda) {
  const double lower = (1.0 / lambda - lipschitz) * r.eta;
  const double upper = (1.0 / lambda + lipschitz) * r.eta;
  return std::max(lower - r.v_norm, r.v_norm - upper);
}

}  // namespace gcnm
