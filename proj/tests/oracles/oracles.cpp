#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace gcnm::oracle {

Vec prox_oracle(const Vec& z, const Regularizer& g, double lambda, const GridSpec& grid) {
  Vec out(z.size());
  Vec y1(1);
  auto objective = [&](double y, double zi) {
    y1[0] = y;
    return g.value(y1) + (y - zi) * (y - zi) / (2.0 * lambda);
  };
  for (Index i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    double best_y = 0.0;
    double best = objective(0.0, zi);
    auto consider = [&](double y) {
      const double v = objective(y, zi);
      if (v < best) {
        best = v;
        best_y = y;
      }
    };
    consider(zi);
    const double hi = std::abs(zi) + grid.pad;
    for (int p = 0; p < grid.points; ++p) {
      consider(-hi + 2.0 * hi * p / (grid.points - 1));
    }
    out[i] = best_y;
  }
  return out;
}

Vec fd_gradient(const std::function<double(const Vec&)>& fn, const Vec& x, double step) {
  Vec g(x.size());
  Vec xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double h = step * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = fn(xp);
    xp[i] = x[i] - h;
    const double fm = fn(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Vec fd_directional(const std::function<Vec(const Vec&)>& fn, const Vec& x, const Vec& w, double step) {
  return (fn(x + step * w) - fn(x - step * w)) / (2.0 * step);
}

Stationarity2d stationary_set_check_2d(const Vec& x) {
  Stationarity2d s;
  if (x.size() != 2) return s;
  s.on_line = std::abs(x[0] + x[1] - 1.0) <= 1e-6;
  s.coordinate_point = (x[0] == 0.0) != (x[1] == 0.0);
  return s;
}

double rel_error(const Vec& a, const Vec& b, double floor) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

}  // namespace gcnm::oracle
