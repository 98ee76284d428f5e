#pragma once

#include "gcnm/core.hpp"
#include "gcnm/operators.hpp"
#include "gcnm/regularizers.hpp"
#include "gcnm/rng.hpp"
#include "gcnm/smooth_models.hpp"

#include <memory>

namespace gcnm::testing {

inline Mat random_matrix(Rng& rng, Index m, Index n) {
  Mat a(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a;
}

inline Vec random_vec(Rng& rng, Index n, double scale = 1.0) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline std::shared_ptr<LeastSquaresRidge> random_ls(Rng& rng, Index m, Index n, double mu2) {
  Vec b(m);
  for (Index i = 0; i < m; ++i) b[i] = rng.uniform();
  return std::make_shared<LeastSquaresRidge>(std::make_shared<DenseOperator>(random_matrix(rng, m, n)), b, mu2);
}

inline std::shared_ptr<StudentT> random_studentt(Rng& rng, Index m, Index n, double nu) {
  return std::make_shared<StudentT>(std::make_shared<DenseOperator>(random_matrix(rng, m, n)),
                                    random_vec(rng, m), nu);
}

inline CompositeProblem l0_problem(std::shared_ptr<const SmoothModel> f, double mu0) {
  return CompositeProblem(std::move(f), std::make_shared<L0Norm>(mu0));
}

/// f(x) = x^2 / 2 in one dimension.
inline std::shared_ptr<QuadraticModel> half_square_1d() {
  return std::make_shared<QuadraticModel>(Mat::Identity(1, 1), Vec::Zero(1));
}

}  // namespace gcnm::testing
