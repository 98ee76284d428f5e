#include "gcnm/operators.hpp"

#include <algorithm>

namespace gcnm {

Vec DenseOperator::apply(const Vec& u) const {
  require_same_size(a_.cols(), u.size(), "DenseOperator::apply");
  return a_ * u;
}

Vec DenseOperator::apply_adjoint(const Vec& w) const {
  require_same_size(a_.rows(), w.size(), "DenseOperator::apply_adjoint");
  return a_.transpose() * w;
}

Vec IdentityOperator::apply(const Vec& u) const {
  require_same_size(n_, u.size(), "IdentityOperator::apply");
  return u;
}

Vec IdentityOperator::apply_adjoint(const Vec& w) const {
  require_same_size(n_, w.size(), "IdentityOperator::apply_adjoint");
  return w;
}

AbsNorms abs_norms(const LinearOperator& op) {
  const Mat* stored = op.dense_matrix();
  const Mat a = stored ? *stored : op.to_dense();
  AbsNorms out;
  if (a.size() == 0) return out;
  out.norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  out.norm_inf = a.cwiseAbs().rowwise().sum().maxCoeff();
  return out;
}

}  // namespace gcnm
