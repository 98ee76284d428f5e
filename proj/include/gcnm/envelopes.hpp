#pragma once

#include "gcnm/core.hpp"

namespace gcnm {

/// Everything the line search needs at one point: f, grad f, the prox-gradient
/// point and the FBE value. The normal-map value needs one more gradient (at
/// x_hat) and is only formed for accepted iterates, see complete_step().
struct FbePoint {
  Vec x;
  double fx = 0.0;
  Vec grad;       ///< grad f(x)
  Vec z;          ///< x - lambda grad f(x)
  Vec x_hat;      ///< Prox_{lambda g}(z)
  double g_hat = 0.0;
  double fbe = 0.0;
};

FbePoint evaluate_fbe_point(const Vec& x, const CompositeProblem& problem, double lambda);

struct ProxGradResult {
  Vec x_hat;
  Vec v_hat;
  double eta = 0.0;     ///< ||x - x_hat||
  double fbe = 0.0;     ///< phi_lambda(x)
  double v_norm = 0.0;  ///< ||v_hat||
  Vec grad_hat;         ///< grad f(x_hat), kept for direction solvers
};

/// x_hat = Prox_{lambda g}(x - lambda grad f(x)),
/// v_hat = grad f(x_hat) - grad f(x) + (x - x_hat) / lambda.
ProxGradResult prox_grad_step(const Vec& x, const CompositeProblem& problem, double lambda);

/// Finishes a prox-gradient step from an already evaluated point.
ProxGradResult complete_step(const FbePoint& p, const CompositeProblem& problem, double lambda);

/// phi_lambda(x) = f(x) + <grad f(x), x_hat - x> + g(x_hat) + ||x_hat - x||^2 / (2 lambda).
double fbe_value(const Vec& x, const Vec& x_hat, const CompositeProblem& problem, double lambda);

/// phi_lambda(x) = f(x) - lambda/2 ||grad f(x)||^2 + e_{lambda g}(x - lambda grad f(x)).
/// Independent evaluation path for cross-checks.
double fbe_value_via_moreau(const Vec& x, const CompositeProblem& problem, double lambda);

/// e_{lambda g}(z) = g(p) + ||p - z||^2 / (2 lambda), p = Prox_{lambda g}(z).
double moreau_envelope(const Vec& z, const Regularizer& g, double lambda);

struct FbeGradient {
  Vec gradient;
  /// z = x - lambda grad f(x) lies within 1e-12 (1 + threshold) of a prox tie,
  /// where the FBE need not be differentiable.
  bool near_tie = false;
};

inline constexpr double kTieRelTol = 1e-12;

/// grad phi_lambda(x) = lambda^{-1} (I - lambda Hess f(x)) (x - x_hat).
FbeGradient fbe_gradient(const Vec& x, const CompositeProblem& problem, double lambda);

/// Slack by which the bound (1/lambda - L) eta <= ||v_hat|| <= (1/lambda + L) eta
/// is violated; <= 0 when it holds.
double sandwich_violation(const ProxGradResult& r, double lipschitz, double lambda);

}  // namespace gcnm
