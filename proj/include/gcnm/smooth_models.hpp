#pragma once

#include "gcnm/core.hpp"

#include <functional>
#include <memory>

namespace gcnm {

// ---------------------------------------------------------------------------
// f(x) = 1/2 ||Ax - b||^2 + mu2 ||x||^2
//   grad f = A^T (Ax - b) + 2 mu2 x,   Hess f = A^T A + 2 mu2 I.

struct LsGradHess {
  Vec gradient;
  /// Hessian action; constant in x.
  std::function<Vec(const Vec&)> hessian_action;
};

class LeastSquaresRidge;

LsGradHess ls_grad_hess(const Vec& x, const LeastSquaresRidge& model);

/// lambda_max(A^T A) by power iteration (residual tol 1e-8, at most 5000
/// iterations) inflated by 1 + 1e-6, plus 2 mu2. Falls back to
/// ||A||_1 ||A||_inf + 2 mu2 when the iteration does not converge.
double ls_lipschitz(const LinearOperator& a, double mu2);

struct PowerIterationResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
};

PowerIterationResult power_iteration_gram(const LinearOperator& a, double tol = 1e-8,
                                          int max_iter = 5000);

class LeastSquaresRidge : public SmoothModel {
 public:
  /// `lipschitz` overrides the power-iteration bound when given.
  LeastSquaresRidge(std::shared_ptr<const LinearOperator> a, Vec b, double mu2,
                    std::optional<double> lipschitz = std::nullopt);

  const LinearOperator& op() const { return *a_; }
  std::shared_ptr<const LinearOperator> op_ptr() const { return a_; }
  const Vec& b() const { return b_; }
  double mu2() const { return mu2_; }

  Index dim() const override { return a_->cols(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double value_and_gradient(const Vec& x, Vec& grad) const override;
  Vec hessian_apply(const Vec& x, const Vec& w) const override;
  Mat restricted_hessian(const Vec& x, const std::vector<Index>& idx) const override;
  double lipschitz() const override { return lipschitz_; }
  std::optional<double> data_residual(const Vec& x) const override;
  std::string name() const override { return "least_squares_ridge"; }

 private:
  std::shared_ptr<const LinearOperator> a_;
  Vec b_;
  double mu2_;
  double lipschitz_;
};

// ---------------------------------------------------------------------------
// f(x) = sum_i log(1 + (Ax - b)_i^2 / nu)
//   grad f = 2 A^T u,             u_i = r_i / (nu + r_i^2)
//   Hess f = 2 A^T diag(D) A,     D_i = (nu - r_i^2) / (nu + r_i^2)^2

class StudentT;

Vec studentt_grad(const Vec& x, const StudentT& model);
Vec studentt_hess_action(const Vec& x, const Vec& w, const StudentT& model);

/// 2 ||A||_1 ||A||_inf.
double studentt_lipschitz(const LinearOperator& a);

class StudentT final : public SmoothModel {
 public:
  StudentT(std::shared_ptr<const LinearOperator> a, Vec b, double nu);

  const LinearOperator& op() const { return *a_; }
  const Vec& b() const { return b_; }
  double nu() const { return nu_; }

  /// Diagonal D(x) of the Hessian's middle factor.
  Vec curvature_weights(const Vec& x) const;

  Index dim() const override { return a_->cols(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override { return studentt_grad(x, *this); }
  double value_and_gradient(const Vec& x, Vec& grad) const override;
  Vec hessian_apply(const Vec& x, const Vec& w) const override {
    return studentt_hess_action(x, w, *this);
  }
  Mat restricted_hessian(const Vec& x, const std::vector<Index>& idx) const override;
  double lipschitz() const override { return lipschitz_; }
  std::optional<double> data_residual(const Vec& x) const override;
  std::string name() const override { return "student_t"; }

 private:
  std::shared_ptr<const LinearOperator> a_;
  Vec b_;
  double nu_;
  double lipschitz_;
};

// ---------------------------------------------------------------------------
// Gaussian blur.

/// size x size kernel, entries proportional to exp(-(i^2 + j^2) / (2 std^2))
/// over centered offsets, normalized to sum 1. `size` must be odd.
Mat gaussian_kernel(int size, double std);

/// 'same'-size 2-D correlation with zero padding on a row-major vectorized
/// width x height image. The adjoint correlates with the flipped kernel.
class BlurOperator final : public LinearOperator {
 public:
  BlurOperator(Mat kernel, Index width, Index height);

  Index width() const { return width_; }
  Index height() const { return height_; }
  const Mat& kernel() const { return kernel_; }

  Index rows() const override { return width_ * height_; }
  Index cols() const override { return width_ * height_; }
  Vec apply(const Vec& u) const override;
  Vec apply_adjoint(const Vec& w) const override;

 private:
  Vec correlate(const Vec& in, bool flipped) const;

  Mat kernel_;
  Index width_;
  Index height_;
};

/// Least squares + ridge with a blur operator. L_f uses the analytic bound
/// 1 + 2 mu2 (normalized nonnegative kernel, so ||B||_1, ||B||_inf <= 1).
class BlurModel final : public LeastSquaresRidge {
 public:
  BlurModel(std::shared_ptr<const BlurOperator> blur, Vec b, double mu2);

  const BlurOperator& blur() const { return *blur_; }
  std::string name() const override { return "blur"; }

 private:
  std::shared_ptr<const BlurOperator> blur_;
};

// ---------------------------------------------------------------------------

/// f(x) = 1/2 x^T Q x - c^T x with symmetric Q. L_f = max |eig(Q)|.
class QuadraticModel final : public SmoothModel {
 public:
  QuadraticModel(Mat q, Vec c);

  Index dim() const override { return q_.rows(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hessian_apply(const Vec&, const Vec& w) const override;
  Mat restricted_hessian(const Vec& x, const std::vector<Index>& idx) const override;
  double lipschitz() const override { return lipschitz_; }
  std::string name() const override { return "quadratic"; }

 private:
  Mat q_;
  Vec c_;
  double lipschitz_;
};

}  // namespace gcnm
