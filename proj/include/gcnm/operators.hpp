#pragma once

#include "gcnm/core.hpp"

namespace gcnm {

/// Explicit m x n matrix.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Mat a) : a_(std::move(a)) {}

  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }
  Vec apply(const Vec& u) const override;
  Vec apply_adjoint(const Vec& w) const override;
  Mat to_dense() const override { return a_; }
  const Mat* dense_matrix() const override { return &a_; }

 private:
  Mat a_;
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Index n) : n_(n) {}

  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  Vec apply(const Vec& u) const override;
  Vec apply_adjoint(const Vec& w) const override;

 private:
  Index n_;
};

/// max column abs-sum ||A||_1 and max row abs-sum ||A||_inf.
struct AbsNorms {
  double norm1 = 0.0;
  double norm_inf = 0.0;
};

AbsNorms abs_norms(const LinearOperator& op);

}  // namespace gcnm
