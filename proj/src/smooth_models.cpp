#include "gcnm/smooth_models.hpp"

#include "gcnm/operators.hpp"
#include "gcnm/rng.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <cmath>

namespace gcnm {

namespace {

Mat gather_columns(const Mat& a, const std::vector<Index>& idx) {
  Mat out(a.rows(), static_cast<Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out.col(static_cast<Index>(c)) = a.col(idx[c]);
  return out;
}

void check_index_set(const std::vector<Index>& idx, Index n, const char* who) {
  for (Index i : idx) {
    if (i < 0 || i >= n) throw InvalidArgument(fmt::format("{}: index {} out of range [0, {})", who, i, n));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Least squares + ridge

PowerIterationResult power_iteration_gram(const LinearOperator& a, double tol, int max_iter) {
  PowerIterationResult out;
  const Index n = a.cols();
  if (n == 0 || a.rows() == 0) {
    out.converged = true;
    return out;
  }
  // A random start avoids being orthogonal to the top eigenvector for
  // structured matrices; the seed is fixed so L_f is reproducible.
  Rng rng(0x6a09e667f3bcc908ULL);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  v.normalize();

  for (int it = 1; it <= max_iter; ++it) {
    const Vec w = a.apply_adjoint(a.apply(v));
    const double rq = v.dot(w);
    out.iterations = it;
    out.eigenvalue = rq;
    const double wn = w.norm();
    if (wn == 0.0) {
      out.eigenvalue = 0.0;
      out.converged = true;
      return out;
    }
    if (!std::isfinite(wn)) return out;
    if ((w - rq * v).norm() <= tol * rq) {
      out.converged = true;
      return out;
    }
    v = w / wn;
  }
  return out;
}

double ls_lipschitz(const LinearOperator& a, double mu2) {
  const PowerIterationResult pi = power_iteration_gram(a);
  if (pi.converged) return pi.eigenvalue * (1.0 + 1e-6) + 2.0 * mu2;
  const AbsNorms norms = abs_norms(a);
  return norms.norm1 * norms.norm_inf + 2.0 * mu2;
}

LsGradHess ls_grad_hess(const Vec& x, const LeastSquaresRidge& model) {
  LsGradHess out;
  out.gradient = model.gradient(x);
  out.hessian_action = [&model](const Vec& w) {
    return model.hessian_apply(Vec(), w);
  };
  return out;
}

LeastSquaresRidge::LeastSquaresRidge(std::shared_ptr<const LinearOperator> a, Vec b,
                                     double mu2, std::optional<double> lipschitz)
    : a_(std::move(a)), b_(std::move(b)), mu2_(mu2) {
  if (!a_) throw InvalidArgument("LeastSquaresRidge: null operator");
  require_same_size(a_->rows(), b_.size(), "LeastSquaresRidge: b");
  require_finite(b_, "LeastSquaresRidge: b");
  if (!std::isfinite(mu2_) || mu2_ < 0.0) {
    throw InvalidArgument(fmt::format("LeastSquaresRidge: mu2 must be >= 0 (got {})", mu2_));
  }
  lipschitz_ = lipschitz ? *lipschitz : ls_lipschitz(*a_, mu2_);
}

double LeastSquaresRidge::value(const Vec& x) const {
  require_same_size(dim(), x.size(), "LeastSquaresRidge::value");
  return 0.5 * (a_->apply(x) - b_).squaredNorm() + mu2_ * x.squaredNorm();
}

Vec LeastSquaresRidge::gradient(const Vec& x) const {
  Vec g;
  value_and_gradient(x, g);
  return g;
}

double LeastSquaresRidge::value_and_gradient(const Vec& x, Vec& grad) const {
  require_same_size(dim(), x.size(), "LeastSquaresRidge::gradient");
  const Vec r = a_->apply(x) - b_;
  grad = a_->apply_adjoint(r) + 2.0 * mu2_ * x;
  return 0.5 * r.squaredNorm() + mu2_ * x.squaredNorm();
}

Vec LeastSquaresRidge::hessian_apply(const Vec&, const Vec& w) const {
  require_same_size(dim(), w.size(), "LeastSquaresRidge::hessian_apply");
  return a_->apply_adjoint(a_->apply(w)) + 2.0 * mu2_ * w;
}

Mat LeastSquaresRidge::restricted_hessian(const Vec& x, const std::vector<Index>& idx) const {
  const Mat* dense = a_->dense_matrix();
  if (!dense) return SmoothModel::restricted_hessian(x, idx);
  check_index_set(idx, dim(), "LeastSquaresRidge::restricted_hessian");
  const Mat aj = gather_columns(*dense, idx);
  Mat h = aj.transpose() * aj;
  h.diagonal().array() += 2.0 * mu2_;
  return h;
}

std::optional<double> LeastSquaresRidge::data_residual(const Vec& x) const {
  return (a_->apply(x) - b_).norm();
}

// ---------------------------------------------------------------------------
// Student's t

double studentt_lipschitz(const LinearOperator& a) {
  const AbsNorms norms = abs_norms(a);
  return 2.0 * norms.norm1 * norms.norm_inf;
}

StudentT::StudentT(std::shared_ptr<const LinearOperator> a, Vec b, double nu)
    : a_(std::move(a)), b_(std::move(b)), nu_(nu) {
  if (!a_) throw InvalidArgument("StudentT: null operator");
  require_same_size(a_->rows(), b_.size(), "StudentT: b");
  require_finite(b_, "StudentT: b");
  if (!std::isfinite(nu_) || !(nu_ > 0.0)) {
    throw InvalidArgument(fmt::format("StudentT: nu must be > 0 (got {})", nu_));
  }
  lipschitz_ = studentt_lipschitz(*a_);
}

double StudentT::value(const Vec& x) const {
  require_same_size(dim(), x.size(), "StudentT::value");
  const Vec r = a_->apply(x) - b_;
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += std::log1p(r[i] * r[i] / nu_);
  return s;
}

double StudentT::value_and_gradient(const Vec& x, Vec& grad) const {
  require_same_size(dim(), x.size(), "StudentT::gradient");
  const Vec r = a_->apply(x) - b_;
  Vec u(r.size());
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) {
    const double r2 = r[i] * r[i];
    s += std::log1p(r2 / nu_);
    u[i] = r[i] / (nu_ + r2);
  }
  grad = 2.0 * a_->apply_adjoint(u);
  return s;
}

Vec studentt_grad(const Vec& x, const StudentT& model) {
  Vec g;
  model.value_and_gradient(x, g);
  return g;
}

Vec StudentT::curvature_weights(const Vec& x) const {
  require_same_size(dim(), x.size(), "StudentT::curvature_weights");
  const Vec r = a_->apply(x) - b_;
  Vec d(r.size());
  for (Index i = 0; i < r.size(); ++i) {
    const double r2 = r[i] * r[i];
    const double den = nu_ + r2;
    d[i] = (nu_ - r2) / (den * den);
  }
  return d;
}

Vec studentt_hess_action(const Vec& x, const Vec& w, const StudentT& model) {
  require_same_size(model.dim(), w.size(), "StudentT::hessian_apply");
  const Vec d = model.curvature_weights(x);
  const Vec aw = model.op().apply(w);
  return 2.0 * model.op().apply_adjoint(d.cwiseProduct(aw));
}

Mat StudentT::restricted_hessian(const Vec& x, const std::vector<Index>& idx) const {
  const Mat* dense = a_->dense_matrix();
  if (!dense) return SmoothModel::restricted_hessian(x, idx);
  check_index_set(idx, dim(), "StudentT::restricted_hessian");
  const Vec d = curvature_weights(x);
  const Mat aj = gather_columns(*dense, idx);
  return 2.0 * aj.transpose() * d.asDiagonal() * aj;
}

std::optional<double> StudentT::data_residual(const Vec& x) const {
  return (a_->apply(x) - b_).norm();
}

// ---------------------------------------------------------------------------
// Blur

Mat gaussian_kernel(int size, double std) {
  if (size < 1 || size % 2 == 0) {
    throw InvalidArgument(fmt::format("gaussian_kernel: size must be odd and >= 1 (got {})", size));
  }
  if (!std::isfinite(std) || !(std > 0.0)) {
    throw InvalidArgument(fmt::format("gaussian_kernel: std must be > 0 (got {})", std));
  }
  const int h = size / 2;
  Mat k(size, size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const double di = i - h, dj = j - h;
      k(i, j) = std::exp(-(di * di + dj * dj) / (2.0 * std * std));
    }
  }
  return k / k.sum();
}

BlurOperator::BlurOperator(Mat kernel, Index width, Index height)
    : kernel_(std::move(kernel)), width_(width), height_(height) {
  if (width_ < 1 || height_ < 1) {
    throw InvalidArgument(fmt::format("BlurOperator: image must be non-empty (got {}x{})", width_, height_));
  }
  if (kernel_.rows() % 2 == 0 || kernel_.cols() % 2 == 0) {
    throw InvalidArgument(fmt::format("BlurOperator: kernel dimensions must be odd (got {}x{})",
                                      kernel_.rows(), kernel_.cols()));
  }
  if (!kernel_.allFinite()) throw InvalidArgument("BlurOperator: kernel contains NaN or Inf");
}

Vec BlurOperator::correlate(const Vec& in, bool flipped) const {
  const Index kr = kernel_.rows(), kc = kernel_.cols();
  const Index hr = kr / 2, hc = kc / 2;
  Vec out = Vec::Zero(in.size());
  for (Index r = 0; r < height_; ++r) {
    for (Index c = 0; c < width_; ++c) {
      double s = 0.0;
      for (Index i = 0; i < kr; ++i) {
        const Index rr = r + i - hr;
        if (rr < 0 || rr >= height_) continue;
        const Index ki = flipped ? kr - 1 - i : i;
        for (Index j = 0; j < kc; ++j) {
          const Index cc = c + j - hc;
          if (cc < 0 || cc >= width_) continue;
          const Index kj = flipped ? kc - 1 - j : j;
          s += kernel_(ki, kj) * in[rr * width_ + cc];
        }
      }
      out[r * width_ + c] = s;
    }
  }
  return out;
}

Vec BlurOperator::apply(const Vec& u) const {
  require_same_size(cols(), u.size(), "BlurOperator::apply");
  return correlate(u, false);
}

Vec BlurOperator::apply_adjoint(const Vec& w) const {
  require_same_size(rows(), w.size(), "BlurOperator::apply_adjoint");
  return correlate(w, true);
}

BlurModel::BlurModel(std::shared_ptr<const BlurOperator> blur, Vec b, double mu2)
    : LeastSquaresRidge(blur, std::move(b), mu2, 1.0 + 2.0 * mu2), blur_(std::move(blur)) {}

// ---------------------------------------------------------------------------
// Quadratic

QuadraticModel::QuadraticModel(Mat q, Vec c) : q_(std::move(q)), c_(std::move(c)) {
  if (q_.rows() != q_.cols()) {
    throw DimensionMismatch(fmt::format("QuadraticModel: Q must be square (got {}x{})", q_.rows(), q_.cols()));
  }
  require_same_size(q_.rows(), c_.size(), "QuadraticModel: c");
  if (!q_.allFinite() || !c_.allFinite()) throw InvalidArgument("QuadraticModel: non-finite data");
  if (!q_.isApprox(q_.transpose(), 1e-12) && q_.size() > 0) {
    throw InvalidArgument("QuadraticModel: Q must be symmetric");
  }
  if (q_.size() == 0) {
    lipschitz_ = 0.0;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(q_, Eigen::EigenvaluesOnly);
  lipschitz_ = es.eigenvalues().cwiseAbs().maxCoeff();
}

double QuadraticModel::value(const Vec& x) const {
  require_same_size(dim(), x.size(), "QuadraticModel::value");
  return 0.5 * x.dot(q_ * x) - c_.dot(x);
}

Vec QuadraticModel::gradient(const Vec& x) const {
  require_same_size(dim(), x.size(), "QuadraticModel::gradient");
  return q_ * x - c_;
}

Vec QuadraticModel::hessian_apply(const Vec&, const Vec& w) const {
  require_same_size(dim(), w.size(), "QuadraticModel::hessian_apply");
  return q_ * w;
}

Mat QuadraticModel::restricted_hessian(const Vec&, const std::vector<Index>& idx) const {
  check_index_set(idx, dim(), "QuadraticModel::restricted_hessian");
  const Index k = static_cast<Index>(idx.size());
  Mat h(k, k);
  for (Index r = 0; r < k; ++r)
    for (Index c = 0; c < k; ++c) h(r, c) = q_(idx[r], idx[c]);
  return h;
}

}  // namespace gcnm
