#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "carve/errors.hpp"
#include "carve/rng.hpp"
#include "carve/rootfind.hpp"
#include "doctest.h"

using namespace carve;

TEST_CASE("known root of x^2 - 4") {
  RootProblem p;
  p.objective = [](double x) { return x * x - 4.0; };
  p.seed = 1.0;
  p.scale = 0.05;  // bracket [0.5, 1.5] grows upward toward the positive root
  p.tol = 1e-12;
  const double x = solve_root(p);
  CHECK(std::abs(x - 2.0) < 1e-10);
}

TEST_CASE("root far outside the initial bracket is found by doubling") {
  RootProblem p;
  p.objective = [](double x) { return std::tanh(x - 1e6); };
  p.seed = 0.0;
  RootStats st;
  const double x = solve_root(p, &st);
  CHECK(std::abs(std::tanh(x - 1e6)) <= p.tol);
  CHECK(st.doublings > 0);
}

TEST_CASE("no sign change raises a bracket error") {
  RootProblem p;
  p.objective = [](double x) { return std::exp(x); };
  p.target = -1.0;
  CHECK_THROWS_AS(solve_root(p), BracketError);
}

TEST_CASE("iteration cap raises a convergence error") {
  RootProblem p;
  p.objective = [](double x) { return std::cbrt(x - 0.3); };
  p.tol = 1e-300;
  p.max_iter = 3;
  CHECK_THROWS_AS(solve_root(p), ConvergenceError);
}

TEST_CASE("invalid problems") {
  RootProblem p;
  p.objective = [](double x) { return x; };
  p.tol = 0.0;
  CHECK_THROWS_AS(solve_root(p), ConfigError);
  p.tol = 1e-8;
  p.max_iter = 0;
  CHECK_THROWS_AS(solve_root(p), ConfigError);
}

// Random strictly increasing piecewise-linear functions; the root may lie
// anywhere within the knots.
TEST_CASE("fallback completeness on random monotone piecewise-linear objectives") {
  CounterRng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform() * 20);
    std::vector<double> xs(k), ys(k);
    double x = -50.0 + 100.0 * rng.uniform(), y = -10.0 * rng.uniform();
    for (int i = 0; i < k; ++i) {
      x += std::pow(10.0, -3.0 + 5.0 * rng.uniform());
      y += std::pow(10.0, -4.0 + 6.0 * rng.uniform());
      xs[i] = x;
      ys[i] = y;
    }
    auto f = [xs, ys](double t) {
      if (t <= xs.front()) return ys.front() + (t - xs.front());
      if (t >= xs.back()) return ys.back() + (t - xs.back());
      const auto it = std::upper_bound(xs.begin(), xs.end(), t);
      const std::size_t i = it - xs.begin();
      const double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
      return ys[i - 1] + w * (ys[i] - ys[i - 1]);
    };
    RootProblem p;
    p.objective = f;
    p.target = ys.front() + rng.uniform() * (ys.back() - ys.front());
    p.seed = -100.0 + 200.0 * rng.uniform();
    p.scale = 0.01;
    const double r = solve_root(p);
    CHECK(std::abs(f(r) - p.target) <= p.tol);
    CHECK(std::abs(f(solve_root_bisection(p)) - p.target) <= p.tol);
  }
}

TEST_CASE("batch: single element, permutation equivariance, parallel determinism") {
  std::vector<RootProblem> probs;
  for (int i = 0; i < 64; ++i) {
    RootProblem p;
    const double c = 0.37 * i - 5.0;
    p.objective = [c](double x) { return std::atan(x - c) + 0.1 * (x - c); };
    p.seed = 0.0;
    probs.push_back(p);
  }
  probs[7].target = 100.0;  // unreachable: atan part is bounded but linear part is not
  probs[9].objective = [](double) { return 1.0; };  // constant: bracket error

  const auto one = solve_batch({probs[3]}, false);
  REQUIRE(one.size() == 1);
  CHECK(one[0].x == solve_root(probs[3]));

  const auto seq = solve_batch(probs, false);
  const auto par = solve_batch(probs, true);
  REQUIRE(seq.size() == probs.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].ok() == par[i].ok());
    if (seq[i].ok()) CHECK(std::memcmp(&seq[i].x, &par[i].x, sizeof(double)) == 0);
  }
  CHECK(seq[7].ok());
  CHECK_FALSE(seq[9].ok());
  CHECK(*seq[9].error == ErrorCode::bracket);

  std::vector<std::size_t> perm(probs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 11, perm.end());
  std::vector<RootProblem> shuffled;
  for (auto i : perm) shuffled.push_back(probs[i]);
  const auto sh = solve_batch(shuffled, true);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seq[perm[i]].ok()) CHECK(sh[i].x == seq[perm[i]].x);
  }
}
