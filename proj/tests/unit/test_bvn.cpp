#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "carve/bvn.hpp"
#include "carve/errors.hpp"
#include "carve/normal.hpp"
#include "doctest.h"

using namespace carve;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Adaptive Gauss-Kronrod on the defining integral.
double owens_t_oracle(double h, double a) {
  auto f = [h](double t) {
    const double u = 1.0 + t * t;
    return std::exp(-0.5 * h * h * u) / u;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, a, 12, 1e-14) /
         (2.0 * std::numbers::pi);
}

const BvnMethod kAll[] = {
    {BvnTag::owen},
    {BvnTag::cox1},
    {BvnTag::cox2_mc, 20000, 20, 5},
    {BvnTag::drezner1, 10000, 20},
    {BvnTag::drezner2, 10000, 20},
    {BvnTag::mc_genz, 20000, 20, 5},
};
}  // namespace

TEST_CASE("owens_t examples and oracle agreement") {
  CHECK(owens_t(1.5, 0.0) == 0.0);
  CHECK(owens_t(0.0, 1.0) == doctest::Approx(0.125).epsilon(1e-15));
  // Frozen 30-digit reference values.
  CHECK(std::abs(owens_t(0.5, 2.0) - 0.141580603653978393466628195881) < 1e-12);
  CHECK(std::abs(owens_t(1.2, 0.7) - 0.0427974426030884907414983745142) < 1e-12);
  CHECK(std::abs(owens_t(2.5, 50.0) - 0.0031048326628880675834890522871) < 1e-12);
  CHECK(std::abs(owens_t(0.5, 2.0) - owens_t_oracle(0.5, 2.0)) < 1e-12);

  for (double h : {-3.0, -0.7, 0.0, 0.2, 1.0, 2.5, 6.0}) {
    for (double a : {0.01, 0.3, 0.99, 1.0, 1.01, 3.0, 25.0, 400.0}) {
      const double t = owens_t(h, a);
      CHECK(std::abs(t - owens_t_oracle(h, a)) < 1e-12);
      CHECK(owens_t(h, -a) == -t);
      CHECK(std::abs(t) <= 0.25);
    }
  }
  CHECK_THROWS_AS(owens_t(kInf, 1.0), DomainError);
  CHECK_THROWS_AS(owens_t(0.0, std::nan("")), DomainError);
}

TEST_CASE("bvn_cdf reference values") {
  CHECK(bvn_cdf({0.0, 0.0, 0.0}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(bvn_cdf({0.0, 0.0, 0.5}) - 1.0 / 3.0) < 1e-10);
  CHECK(bvn_cdf({1.2, -0.3, 1.0}) == doctest::Approx(std_norm_cdf(-0.3)).epsilon(1e-15));
  CHECK(bvn_cdf({kInf, 0.7, -0.4}) == doctest::Approx(std_norm_cdf(0.7)).epsilon(1e-15));
  CHECK(bvn_cdf({-kInf, 0.7, 0.4}) == 0.0);
  CHECK(bvn_cdf({1.0, -1.2, -1.0}) == 0.0);
  CHECK(bvn_cdf({1.0, 1.2, -1.0}) ==
        doctest::Approx(std_norm_cdf(1.0) + std_norm_cdf(1.2) - 1.0).epsilon(1e-15));
}

TEST_CASE("bvn_cdf errors") {
  CHECK_THROWS_AS(bvn_cdf({0.0, 0.0, 1.01}), DomainError);
  CHECK_THROWS_AS(bvn_cdf({std::nan(""), 0.0, 0.1}), DomainError);
  CHECK_THROWS_AS(bvn_cdf({0.0, 0.0, 0.1}, {BvnTag::mc_genz, 0}), ConfigError);
  CHECK_THROWS_AS(bvn_cdf({0.0, 0.0, 0.1}, {BvnTag::cox2_mc, 99}), ConfigError);
  CHECK_THROWS_AS(bvn_cdf({0.0, 0.0, 0.1}, {BvnTag::drezner1, 1000, 7}), ConfigError);
  CHECK(parse_bvn_tag("mc_genz") == BvnTag::mc_genz);
  CHECK(to_string(BvnTag::drezner2) == "drezner2");
  CHECK_THROWS_AS(parse_bvn_tag("genz"), ConfigError);
}

TEST_CASE("owen orthant identity across rho") {
  for (double rho = -0.999; rho < 1.0; rho += 0.037) {
    CHECK(std::abs(bvn_cdf({0.0, 0.0, rho}) - (0.25 + std::asin(rho) / (2 * std::numbers::pi))) <
          1e-12);
  }
}

TEST_CASE("owen invariants: symmetry, Frechet bounds, reduction, monotonicity") {
  const double xs[] = {-4.0, -2.1, -1.0, -0.3, 0.0, 0.4, 1.1, 2.5, 5.0};
  for (double rho : {-0.97, -0.6, -0.1, 0.0, 0.25, 0.8, 0.999}) {
    for (double x1 : xs) {
      double prev = -1.0;
      for (double x2 : xs) {
        const double b = bvn_cdf({x1, x2, rho});
        CHECK(std::abs(b - bvn_cdf({x2, x1, rho})) < 1e-14);
        const double p1 = std_norm_cdf(x1), p2 = std_norm_cdf(x2);
        CHECK(b >= std::max(0.0, p1 + p2 - 1.0) - 1e-10);
        CHECK(b <= std::min(p1, p2) + 1e-10);
        if (rho == 0.0) CHECK(std::abs(b - p1 * p2) < 1e-12);
        CHECK(b >= prev - 1e-12);
        prev = b;
      }
    }
  }
  // Fine-grid monotonicity in x1.
  for (double rho : {-0.9, 0.5}) {
    double prev = 0.0;
    for (double x1 = -6.0; x1 <= 6.0; x1 += 0.01) {
      const double b = bvn_cdf({x1, 0.3, rho});
      CHECK(b >= prev - 1e-12);
      prev = b;
    }
  }
}

TEST_CASE("quadrature and Monte Carlo methods agree with owen") {
  for (double rho : {-0.8, -0.3, 0.4, 0.9}) {
    for (double x1 : {-1.5, 0.0, 0.8}) {
      for (double x2 : {-0.7, 0.3, 2.0}) {
        const BvnQuery q{x1, x2, rho};
        const double ref = bvn_cdf(q);
        CHECK(std::abs(bvn_cdf(q, {BvnTag::drezner1, 1, 20}) - ref) < 1e-10);
        CHECK(std::abs(bvn_cdf(q, {BvnTag::drezner2, 1, 20}) - ref) < 1e-10);
        CHECK(std::abs(bvn_cdf(q, {BvnTag::mc_genz, 100000, 20, 3}) - ref) < 5e-3);
        CHECK(std::abs(bvn_cdf(q, {BvnTag::cox2_mc, 100000, 20, 3}) - ref) < 5e-3);
        const double cox = bvn_cdf(q, {BvnTag::cox1});
        CHECK((cox >= 0.0 && cox <= 1.0));
        // Symmetry within method tolerance.
        CHECK(std::abs(bvn_cdf({x2, x1, rho}, {BvnTag::drezner1, 1, 20}) - ref) < 1e-10);
      }
    }
  }
}

TEST_CASE("rho = 0 grid: every method reproduces the product of marginals") {
  for (const auto& m : kAll) {
    for (double x1 : {-2.0, -0.5, 0.0, 1.3}) {
      for (double x2 : {-1.0, 0.2, 2.7}) {
        const double ref = std_norm_cdf(x1) * std_norm_cdf(x2);
        CHECK(std::abs(bvn_cdf({x1, x2, 0.0}, m) - ref) < 1e-6);
      }
    }
  }
}

TEST_CASE("Monte Carlo methods are deterministic under a seed") {
  const BvnQuery q{0.3, -0.2, 0.6};
  for (BvnTag t : {BvnTag::mc_genz, BvnTag::cox2_mc}) {
    const BvnMethod m{t, 5000, 20, 17};
    CHECK(bvn_cdf(q, m) == bvn_cdf(q, m));
    CHECK(bvn_cdf(q, m) != bvn_cdf(q, {t, 5000, 20, 18}));
  }
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const auto& gl = gauss_legendre(40);
  REQUIRE(gl.nodes.size() == 40);
  for (int k = 0; k <= 79; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    CHECK(std::abs(s - exact) < 1e-14);
  }
}

TEST_CASE("benchmark: single query, CSV shape, determinism, errors") {
  const std::vector<BvnQuery> one{{0.0, 0.0, 0.0}};
  const std::vector<BvnMethod> methods(std::begin(kAll), std::end(kAll));
  const std::uint64_t k = 1'000'000;
  const auto rep = bvn_benchmark(one, methods, k, 3);
  REQUIRE(rep.rows.size() == methods.size());
  const double oracle_band = 3.0 * std::sqrt(0.25 * 0.75 / k);
  for (const auto& r : rep.rows) {
    CHECK(r.n_evals == 1);
    const double tol = r.method == "mc_genz" || r.method == "cox2_mc" ? 0.02 : 1e-6;
    CHECK(r.cum_abs_error <= oracle_band + tol);
  }
  const std::string csv = rep.to_csv();
  CHECK(csv.rfind("method,n_evals,total_seconds,cum_abs_error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  const auto grid = make_bvn_grid(20, 9);
  CHECK(grid.size() == 20);
  const auto r1 = bvn_benchmark(grid, {{BvnTag::owen}, {BvnTag::mc_genz, 1000}}, k, 4);
  const auto r2 = bvn_benchmark(grid, {{BvnTag::owen}, {BvnTag::mc_genz, 1000}}, k, 4);
  CHECK(r1.rows[1].cum_abs_error == r2.rows[1].cum_abs_error);
  CHECK(r1.rows[0].cum_abs_error <= r1.rows[1].cum_abs_error);

  CHECK_THROWS_AS(bvn_benchmark({}, methods, k, 1), ConfigError);
  CHECK_THROWS_AS(bvn_benchmark(one, methods, 1000, 1), ConfigError);
}
