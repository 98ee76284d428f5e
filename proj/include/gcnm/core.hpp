#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcnm {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors. The C++ core throws; the C API maps these onto status codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter outside its admissible range (config, dimensions, weights).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected by make_config.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A requested capability the problem does not provide (e.g. no prox Jacobian).
class Unsupported : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `offset` is the byte position where decoding failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(what), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

bool all_finite(const Vec& v);
void require_finite(const Vec& v, const char* what);
void require_same_size(Index a, Index b, const char* what);

// ---------------------------------------------------------------------------
// Matrix-free linear operator A : R^cols -> R^rows.

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  virtual Vec apply(const Vec& u) const = 0;
  virtual Vec apply_adjoint(const Vec& w) const = 0;

  /// Dense materialization. The default builds it column by column from apply().
  virtual Mat to_dense() const;

  /// Non-null when the operator stores an explicit matrix.
  virtual const Mat* dense_matrix() const { return nullptr; }
};

struct AdjointReport {
  double max_defect = 0.0;  ///< max relative |<Au,w> - <u,A^T w>| over probes
  int probes = 0;
  bool passed = false;      ///< max_defect <= tolerance
  double tolerance = 1e-10;
};

AdjointReport validate_operator_adjoint(const LinearOperator& op, int probes,
                                        std::uint64_t seed,
                                        double tolerance = 1e-10);

/// Max relative entrywise gap between to_dense() and apply() on basis vectors.
double dense_consistency_defect(const LinearOperator& op);

// ---------------------------------------------------------------------------
// Smooth part f of the composite objective.

class SmoothModel {
 public:
  virtual ~SmoothModel() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;

  /// f(x) and its gradient in one pass (shares the residual computation).
  virtual double value_and_gradient(const Vec& x, Vec& grad) const {
    grad = gradient(x);
    return value(x);
  }

  /// w -> Hess f(x) w.
  virtual Vec hessian_apply(const Vec& x, const Vec& w) const = 0;

  /// Hessian restricted to rows/columns `idx`. The default probes hessian_apply.
  virtual Mat restricted_hessian(const Vec& x, const std::vector<Index>& idx) const;

  /// Lipschitz modulus of the gradient on all of R^n.
  virtual double lipschitz() const = 0;

  /// ||Ax - b|| for data-fitting models; reported as delta_k in run tables.
  virtual std::optional<double> data_residual(const Vec& /*x*/) const {
    return std::nullopt;
  }

  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Nonsmooth part g.

class Regularizer {
 public:
  virtual ~Regularizer() = default;

  virtual double value(const Vec& x) const = 0;

  /// A global minimizer of y -> g(y) + ||y - z||^2 / (2 lambda).
  virtual Vec prox(const Vec& z, double lambda) const = 0;

  /// v in the limiting subdifferential of g at x, with |.| <= tol slack on
  /// components that must vanish.
  virtual bool is_subgradient(const Vec& x, const Vec& v, double tol = 0.0) const = 0;

  /// Prox-boundedness threshold lambda_g.
  virtual double prox_threshold() const { return kInf; }

  /// Coordinates on which the Newton equation (Hess f d + v)_i = 0 is imposed;
  /// the remaining coordinates of d are fixed to zero. nullopt if the
  /// regularizer has no such structure.
  virtual std::optional<std::vector<Index>> newton_free_set(const Vec& /*x_hat*/) const {
    return std::nullopt;
  }

  /// Diagonal of an element of the Bouligand Jacobian of Prox_{lambda g} at z.
  virtual std::optional<Vec> prox_jacobian(const Vec& /*z*/, double /*lambda*/) const {
    return std::nullopt;
  }

  /// True when z is within `rel` of a point where the prox is set-valued.
  virtual bool near_prox_tie(const Vec& /*z*/, double /*lambda*/, double /*rel*/) const {
    return false;
  }

  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------

/// minimize f(x) + g(x). Immutable after construction; safe to share.
class CompositeProblem {
 public:
  CompositeProblem(std::shared_ptr<const SmoothModel> f,
                   std::shared_ptr<const Regularizer> g);

  const SmoothModel& smooth() const { return *f_; }
  const Regularizer& reg() const { return *g_; }
  std::shared_ptr<const SmoothModel> smooth_ptr() const { return f_; }
  std::shared_ptr<const Regularizer> reg_ptr() const { return g_; }

  Index dim() const { return f_->dim(); }
  double lipschitz() const { return lipschitz_; }

  double objective(const Vec& x) const { return f_->value(x) + g_->value(x); }

 private:
  std::shared_ptr<const SmoothModel> f_;
  std::shared_ptr<const Regularizer> g_;
  double lipschitz_;
};

// ---------------------------------------------------------------------------

struct SolverConfig {
  double lambda = 0.0;
  double sigma = 0.0;
  double beta = 0.5;
  double tol = 1e-6;
  int max_iter = 10000;
  int max_backtracks = 50;
};

struct ConfigOverrides {
  std::optional<double> lambda;
  std::optional<double> sigma;
  std::optional<double> beta;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<int> max_backtracks;
};

/// Open upper bound of the sigma interval: lambda (1 - lambda L) / (2 (1 + lambda L)^2).
double sigma_upper_bound(double lambda, double lipschitz);

/// Builds a config for `problem`, filling defaults and validating
///   lambda in (0, min{1/L_f, lambda_g}),
///   sigma  in (0, lambda (1 - lambda L_f) / (2 (1 + lambda L_f)^2)),
///   beta   in (0, 1).
/// Throws ConfigError naming the violated bound.
SolverConfig make_config(const CompositeProblem& problem,
                         const ConfigOverrides& overrides = {});

/// Same checks against an explicit L_f and lambda_g.
SolverConfig make_config(double lipschitz, double lambda_g,
                         const ConfigOverrides& overrides = {});

// ---------------------------------------------------------------------------

enum class DirectionStatus { none, solved, fallback_zero };

const char* to_string(DirectionStatus s);

/// Snapshot of one iteration. Vector fields are empty unless the run keeps
/// iterates; the last record of a converged run is the stopping record
/// (tau = 0, no direction).
struct IterationRecord {
  int k = 0;
  Vec x, x_hat, v_hat, d;
  double tau = 0.0;
  double fbe = 0.0;
  double eta = 0.0;
  double v_norm = 0.0;
  int backtracks = 0;
  bool took_prox_fallback = false;  ///< backtrack cap hit, x_{k+1} = x_hat
  DirectionStatus direction = DirectionStatus::none;
  double elapsed = 0.0;  ///< seconds since solver start
};

}  // namespace gcnm
