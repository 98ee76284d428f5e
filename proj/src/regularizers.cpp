#include "gcnm/regularizers.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace gcnm {

double l0_value(const Vec& x, double mu0) {
  Index count = 0;
  for (Index i = 0; i < x.size(); ++i) count += (x[i] != 0.0);
  return mu0 * static_cast<double>(count);
}

double l0_threshold(double lambda, double mu0) { return std::sqrt(2.0 * lambda * mu0); }

Vec l0_prox(const Vec& z, double lambda, double mu0, TiePolicy tie) {
  const double t = l0_threshold(lambda, mu0);
  Vec out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z[i]);
    const bool keep = a > t || (a == t && tie == TiePolicy::keep);
    out[i] = keep ? z[i] : 0.0;
  }
  return out;
}

bool l0_subdiff_member(const Vec& x, const Vec& v, double tol) {
  require_same_size(x.size(), v.size(), "l0_subdiff_member");
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0 && std::abs(v[i]) > tol) return false;
  }
  return true;
}

Vec l0_prox_jacobian(const Vec& z, double lambda, double mu0, TiePolicy tie) {
  const Vec p = l0_prox(z, lambda, mu0, tie);
  Vec diag(z.size());
  // The prox is locally the identity where it keeps z_i and locally zero elsewhere.
  for (Index i = 0; i < z.size(); ++i) diag[i] = (p[i] != 0.0) ? 1.0 : 0.0;
  return diag;
}

std::vector<Index> support_of(const Vec& x) {
  std::vector<Index> idx;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) idx.push_back(i);
  }
  return idx;
}

L0Norm::L0Norm(double mu0, TiePolicy tie) : mu0_(mu0), tie_(tie) {
  if (!std::isfinite(mu0) || !(mu0 > 0.0)) {
    throw InvalidArgument(fmt::format("L0Norm: mu0 must be > 0 (got {})", mu0));
  }
}

bool L0Norm::near_prox_tie(const Vec& z, double lambda, double rel) const {
  const double t = l0_threshold(lambda, mu0_);
  for (Index i = 0; i < z.size(); ++i) {
    if (std::abs(std::abs(z[i]) - t) <= rel * (1.0 + t)) return true;
  }
  return false;
}

bool ZeroReg::is_subgradient(const Vec&, const Vec& v, double tol) const {
  return v.size() == 0 || v.cwiseAbs().maxCoeff() <= tol;
}

std::optional<std::vector<Index>> ZeroReg::newton_free_set(const Vec& x_hat) const {
  std::vector<Index> all(static_cast<std::size_t>(x_hat.size()));
  std::iota(all.begin(), all.end(), Index{0});
  return all;
}

}  // namespace gcnm
