#include "gcnm/envelopes.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gcnm;
using namespace gcnm::testing;

namespace {

// Support of the prox pattern is unchanged across the FD stencil around x.
bool stable_pattern(const CompositeProblem& p, const Vec& x, double lambda, double step) {
  auto pattern = [&](const Vec& y) {
    const Vec z = y - lambda * p.smooth().gradient(y);
    return support_of(p.reg().prox(z, lambda));
  };
  const auto base = pattern(x);
  Vec y = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double h = step * (1.0 + std::abs(x[i]));
    for (double s : {h, -h}) {
      y[i] = x[i] + s;
      if (pattern(y) != base) return false;
    }
    y[i] = x[i];
  }
  return true;
}

void check_fbe_gradient_fd(const CompositeProblem& p, Rng& rng, double scale, int points) {
  const double lambda = make_config(p).lambda;
  int checked = 0;
  while (checked < points) {
    const Vec x = random_vec(rng, p.dim(), scale);
    const FbeGradient g = fbe_gradient(x, p, lambda);
    if (g.near_tie || !stable_pattern(p, x, lambda, 1e-6)) continue;
    const Vec fd = oracle::fd_gradient([&](const Vec& y) { return prox_grad_step(y, p, lambda).fbe; }, x);
    CHECK(oracle::rel_error(g.gradient, fd) <= 1e-6);
    ++checked;
  }
}

}  // namespace

TEST_SUITE("envelopes") {
  TEST_CASE("1-D worked example") {
    const CompositeProblem p = l0_problem(half_square_1d(), 1.0);
    const ProxGradResult r = prox_grad_step(vec({3}), p, 0.5);
    CHECK(r.x_hat[0] == 1.5);
    CHECK(r.v_hat[0] == 1.5);
    CHECK(r.eta == 1.5);
    CHECK(r.fbe == doctest::Approx(3.25));
    CHECK(fbe_value(vec({3}), r.x_hat, p, 0.5) == doctest::Approx(3.25));
    CHECK(fbe_value_via_moreau(vec({3}), p, 0.5) == doctest::Approx(3.25));
    CHECK(fbe_gradient(vec({3}), p, 0.5).gradient[0] == doctest::Approx(1.5));
    CHECK((1.0 / 0.5 - 1.0) * r.eta <= r.v_norm);
    CHECK(sandwich_violation(r, 1.0, 0.5) <= 0.0);
    // (x_hat, v_hat - grad f(x_hat)) lies in the graph of dg.
    CHECK(p.reg().is_subgradient(r.x_hat, r.v_hat - p.smooth().gradient(r.x_hat)));
  }

  TEST_CASE("critical point gives zero residuals") {
    const CompositeProblem p = l0_problem(half_square_1d(), 1.0);
    const ProxGradResult r = prox_grad_step(vec({0}), p, 0.5);
    CHECK(r.eta == 0.0);
    CHECK(r.v_norm == 0.0);
    CHECK(fbe_gradient(vec({0}), p, 0.5).gradient[0] == 0.0);
  }

  TEST_CASE("zero regularizer collapses the FBE") {
    const CompositeProblem p(half_square_1d(), std::make_shared<ZeroReg>());
    CHECK(prox_grad_step(vec({1}), p, 0.5).fbe == doctest::Approx(0.25));
    CHECK(fbe_value_via_moreau(vec({1}), p, 0.5) == doctest::Approx(0.25));
  }

  TEST_CASE("moreau envelope") {
    CHECK(moreau_envelope(vec({0.5}), L0Norm(1.0), 0.5) == doctest::Approx(0.25));
    CHECK(moreau_envelope(vec({3.0}), L0Norm(1.0), 0.5) == doctest::Approx(1.0));
    CHECK(moreau_envelope(vec({1, -2}), ZeroReg(), 0.5) == 0.0);
    CHECK(moreau_envelope(vec({0, 0}), L0Norm(1.0), 0.5) == 0.0);
  }

  TEST_CASE("tie flag") {
    const CompositeProblem p = l0_problem(half_square_1d(), 1.0);
    // z = x - 0.5 x = x / 2 hits the threshold 1 at x = 2.
    CHECK(fbe_gradient(vec({2}), p, 0.5).near_tie);
    CHECK_FALSE(fbe_gradient(vec({2.1}), p, 0.5).near_tie);
  }

  TEST_CASE("property: envelope identities on random least-squares instances") {
    Rng rng(51);
    for (int inst = 0; inst < 5; ++inst) {
      const auto f = random_ls(rng, 20, 100, 0.01);
      const CompositeProblem p = l0_problem(f, 1e-2);
      const double lambda = make_config(p).lambda;
      const double lf = p.lipschitz();
      for (int t = 0; t < 40; ++t) {
        const Vec x = random_vec(rng, 100, 0.3);
        const ProxGradResult r = prox_grad_step(x, p, lambda);
        CHECK(sandwich_violation(r, lf, lambda) <= 1e-9);
        CHECK(r.fbe <= p.objective(x) + 1e-12 * (1 + std::abs(p.objective(x))));
        const double alt = fbe_value_via_moreau(x, p, lambda);
        CHECK(std::abs(alt - r.fbe) <= 1e-10 * std::max(1.0, std::abs(r.fbe)));
        CHECK(r.fbe >= p.objective(r.x_hat) + (1 - lambda * lf) / (2 * lambda) * r.eta * r.eta -
                           1e-10 * std::max(1.0, std::abs(r.fbe)));
        CHECK(p.reg().is_subgradient(r.x_hat, r.v_hat - p.smooth().gradient(r.x_hat), 1e-9));
      }
    }
  }

  TEST_CASE("property: FBE gradient matches finite differences") {
    Rng rng(52);
    const CompositeProblem ls = l0_problem(random_ls(rng, 4, 20, 0.01), 1e-2);
    check_fbe_gradient_fd(ls, rng, 0.3, 50);
    const CompositeProblem st = l0_problem(random_studentt(rng, 16, 8, 1.0), 1e-3);
    check_fbe_gradient_fd(st, rng, 0.5, 50);
    const CompositeProblem sm(random_ls(rng, 5, 3, 0.1), std::make_shared<ZeroReg>());
    check_fbe_gradient_fd(sm, rng, 1.0, 20);
  }

  TEST_CASE("complete_step agrees with prox_grad_step") {
    Rng rng(53);
    const CompositeProblem p = l0_problem(random_ls(rng, 5, 25, 0.01), 1e-2);
    const double lambda = make_config(p).lambda;
    const Vec x = random_vec(rng, 25);
    const ProxGradResult a = prox_grad_step(x, p, lambda);
    const ProxGradResult b = complete_step(evaluate_fbe_point(x, p, lambda), p, lambda);
    CHECK(a.x_hat == b.x_hat);
    CHECK(a.v_hat == b.v_hat);
    CHECK(a.fbe == b.fbe);
  }
}
