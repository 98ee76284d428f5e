#pragma once

#include "gcnm/core.hpp"

namespace gcnm {

/// Selection at |z_i| == sqrt(2 lambda mu0), where the l0 prox is {0, z_i}.
enum class TiePolicy { zero, keep };

// Free functions on the scaled l0 "norm" g(x) = mu0 * #{i : x_i != 0}.
// Support is exact: a stored 0.0 is zero, anything else (however small) counts.

double l0_value(const Vec& x, double mu0);

double l0_threshold(double lambda, double mu0);

/// Componentwise hard thresholding at sqrt(2 lambda mu0).
Vec l0_prox(const Vec& z, double lambda, double mu0, TiePolicy tie = TiePolicy::zero);

/// v in d(mu0 ||.||_0)(x): v_i == 0 wherever x_i != 0, free elsewhere.
bool l0_subdiff_member(const Vec& x, const Vec& v, double tol = 0.0);

/// 0/1 diagonal of a Bouligand-Jacobian element of the l0 prox, consistent
/// with l0_prox at ties.
Vec l0_prox_jacobian(const Vec& z, double lambda, double mu0, TiePolicy tie = TiePolicy::zero);

std::vector<Index> support_of(const Vec& x);

class L0Norm final : public Regularizer {
 public:
  explicit L0Norm(double mu0, TiePolicy tie = TiePolicy::zero);

  double mu0() const { return mu0_; }
  TiePolicy tie_policy() const { return tie_; }

  double value(const Vec& x) const override { return l0_value(x, mu0_); }
  Vec prox(const Vec& z, double lambda) const override { return l0_prox(z, lambda, mu0_, tie_); }
  bool is_subgradient(const Vec& x, const Vec& v, double tol = 0.0) const override {
    return l0_subdiff_member(x, v, tol);
  }
  std::optional<std::vector<Index>> newton_free_set(const Vec& x_hat) const override {
    return support_of(x_hat);
  }
  std::optional<Vec> prox_jacobian(const Vec& z, double lambda) const override {
    return l0_prox_jacobian(z, lambda, mu0_, tie_);
  }
  bool near_prox_tie(const Vec& z, double lambda, double rel) const override;
  std::string name() const override { return "l0"; }

 private:
  double mu0_;
  TiePolicy tie_;
};

/// g == 0. The composite solvers reduce to smooth descent.
class ZeroReg final : public Regularizer {
 public:
  double value(const Vec&) const override { return 0.0; }
  Vec prox(const Vec& z, double) const override { return z; }
  bool is_subgradient(const Vec&, const Vec& v, double tol = 0.0) const override;
  std::optional<std::vector<Index>> newton_free_set(const Vec& x_hat) const override;
  std::optional<Vec> prox_jacobian(const Vec& z, double) const override {
    return Vec::Ones(z.size());
  }
  std::string name() const override { return "zero"; }
};

}  // namespace gcnm
