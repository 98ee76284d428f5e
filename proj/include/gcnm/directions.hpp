#pragma once

#include "gcnm/core.hpp"

#include <functional>

namespace gcnm {

struct NewtonDirectionOutcome {
  Vec d;
  DirectionStatus status = DirectionStatus::solved;
  double residual = 0.0;       ///< norm of the linear-system residual
  std::vector<Index> support;  ///< free index set J
  bool used_cg = false;
  int cg_iterations = 0;
};

struct DirectionOptions {
  double linsolve_tol = 1e-10;
  Index dense_limit = 512;       ///< |J| above this switches to CG
  int cg_iteration_factor = 10;  ///< CG cap = factor * |J|
  Index generic_dense_limit = 4096;
};

/// Hessian of f at a fixed point. `restricted` is optional; when absent the
/// dense block is probed through `apply`.
struct HessianAccess {
  std::function<Vec(const Vec&)> apply;
  std::function<Mat(const std::vector<Index>&)> restricted;
};

HessianAccess hessian_at(const SmoothModel& f, const Vec& x);

/// Support-reduced Newton system for the l0 regularizer:
///   J = support(x_hat), d_i = 0 off J, H_JJ d_J = -v_hat_J.
/// Dense full-pivot LU up to dense_limit, CG on the masked Hessian action
/// beyond it. Singular or unsolved systems give d = 0 with fallback_zero.
NewtonDirectionOutcome l0_newton_direction(const Vec& x_hat, const Vec& v_hat,
                                           const HessianAccess& hess,
                                           const DirectionOptions& opts = {});

/// Same reduced system over an arbitrary free set J.
NewtonDirectionOutcome reduced_newton_direction(const std::vector<Index>& free_set,
                                                const Vec& v_hat, const HessianAccess& hess,
                                                const DirectionOptions& opts = {});

/// (I - A + lambda A Hess f(x_hat)) d = -lambda A v_hat, with A the diagonal
/// prox Jacobian at z = x_hat + lambda (v_hat - grad f(x_hat)). Dense solve;
/// throws Unsupported("direction strategy unsupported") when the regularizer
/// has no Jacobian or n exceeds generic_dense_limit.
NewtonDirectionOutcome generic_newton_direction(const Vec& x_hat, const Vec& v_hat,
                                                const CompositeProblem& problem, double lambda,
                                                const DirectionOptions& opts = {},
                                                const Vec* grad_hat = nullptr);

}  // namespace gcnm
