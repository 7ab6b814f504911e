#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "carve/errors.hpp"
#include "carve/rng.hpp"
#include "carve/selection.hpp"
#include "doctest.h"
#include "support/sim.hpp"

using namespace carve;
using testing::gaussian_matrix;
using testing::gaussian_vector;

namespace {

double soft(double z, double t) { return std::copysign(std::max(std::abs(z) - t, 0.0), z); }

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("lasso on an orthogonal design is soft thresholding") {
  const int n = 40, p = 6;
  const Matrix Q = gaussian_matrix(n, p, 3).householderQr().householderQ() *
                   Matrix::Identity(n, p);
  const Matrix X = std::sqrt(double(n)) * Q;
  CounterRng rng(4);
  std::normal_distribution<double> nd;
  const Vector y = X.col(0) * 0.8 - X.col(2) * 0.3 + gaussian_vector(n, rng, nd);
  const double lam = 0.2;
  const Vector beta = lasso_fit(X, y, lam).beta;
  const Vector z = X.transpose() * y / n;
  for (int j = 0; j < p; ++j) CHECK(beta[j] == doctest::Approx(soft(z[j], lam)).epsilon(1e-9));
}

TEST_CASE("lasso solution satisfies the KKT conditions") {
  const int n = 60, p = 25;
  const Matrix X = standardize_columns(gaussian_matrix(n, p, 5));
  CounterRng rng(6);
  std::normal_distribution<double> nd;
  const Vector y = center(X.col(1) - 0.5 * X.col(7) + gaussian_vector(n, rng, nd));
  for (double frac : {0.9, 0.5, 0.2}) {
    const double lam = frac * lambda_max(X, y);
    const Vector beta = lasso_fit(X, y, lam).beta;
    const Vector grad = X.transpose() * (y - X * beta) / n;
    for (int j = 0; j < p; ++j) {
      if (beta[j] != 0.0) {
        CHECK(grad[j] == doctest::Approx(lam * std::copysign(1.0, beta[j])).epsilon(1e-7));
      } else {
        CHECK(std::abs(grad[j]) <= lam * (1 + 1e-7));
      }
    }
  }
}

TEST_CASE("lambda_max is the smallest penalty with an empty fit") {
  const Matrix X = standardize_columns(gaussian_matrix(30, 8, 7));
  CounterRng rng(8);
  std::normal_distribution<double> nd;
  const Vector y = center(gaussian_vector(30, rng, nd));
  const double lmax = lambda_max(X, y);
  CHECK(lasso_fit(X, y, lmax).beta.isZero());
  CHECK(lasso_fit(X, y, 0.98 * lmax).beta.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("lasso exhausting its sweep budget raises ConvergenceError") {
  const Matrix X = standardize_columns(gaussian_matrix(30, 8, 9));
  CounterRng rng(10);
  std::normal_distribution<double> nd;
  const Vector y = center(gaussian_vector(30, rng, nd));
  CHECK_THROWS_AS(lasso_fit(X, y, 0.01, {1e-16, 1}), ConvergenceError);
}

TEST_CASE("lasso event contains the data and matches reselection") {
  const int n = 10, p = 3;
  const Matrix X = center_columns(gaussian_matrix(n, p, 11));
  CounterRng rng(12);
  std::normal_distribution<double> nd;
  const Vector y = center(X * Vector::Constant(p, 0.7) + gaussian_vector(n, rng, nd));
  const double lam = 0.3;
  const SelectionOutcome out = lasso_outcome(X, lasso_fit(X, y, lam).beta);
  REQUIRE(!out.M.empty());
  const PolyhedralEvent ev = lasso_event(X, y, lam, out);
  CHECK(contains(ev, y));

  int agree = 0;
  const int reps = 5000;
  for (int r = 0; r < reps; ++r) {
    const Vector ys = center(y + 0.6 * gaussian_vector(n, rng, nd));
    const SelectionOutcome o = lasso_outcome(X, lasso_fit(X, ys, lam).beta);
    const bool same = o.M == out.M && o.signs == out.signs;
    agree += same == contains(ev, ys);
  }
  CHECK(agree >= reps - 5);
}

TEST_CASE("top_k breaks ties toward the lowest index") {
  Matrix X = Matrix::Zero(4, 5);
  X.col(0) << 1, 0, 0, 0;
  X.col(1) << 0, 2, 0, 0;
  X.col(2) << 0, -2, 0, 0;
  X.col(3) << 0, 0, 2, 0;
  X.col(4) << 0, 0, 0, 1;
  const Vector y = Vector::Ones(4);
  CHECK(top_k(X, y, 2) == std::vector<int>{1, 2});
  CHECK(top_k(X, y, 3) == std::vector<int>{1, 2, 3});
  CHECK_THROWS_AS(top_k(X, y, 6), ConfigError);
}

TEST_CASE("marginal screening event matches reselection") {
  const int n = 10, p = 4, k = 2;
  const Matrix X = center_columns(gaussian_matrix(n, p, 13));
  CounterRng rng(14);
  std::normal_distribution<double> nd;
  const Vector y = center(X.col(0) + gaussian_vector(n, rng, nd));
  const Screening sc = marginal_screen_event(X, y, k);
  CHECK(sc.outcome.M.size() == k);
  CHECK(sc.event.A.rows() == k + 2 * k * (p - k));
  CHECK(contains(sc.event, y));
  int agree = 0;
  const int reps = 5000;
  for (int r = 0; r < reps; ++r) {
    const Vector ys = center(y + gaussian_vector(n, rng, nd));
    const Screening s2 = marginal_screen_event(X, ys, k);
    const bool same = s2.outcome.M == sc.outcome.M && s2.outcome.signs == sc.outcome.signs;
    agree += same == contains(sc.event, ys);
  }
  CHECK(agree >= reps - 5);
}

TEST_CASE("truncation bounds bracket eta'y and mark the event boundary") {
  const int n = 12, p = 5;
  const Matrix X = center_columns(gaussian_matrix(n, p, 15));
  CounterRng rng(16);
  std::normal_distribution<double> nd;
  const Vector y = center(X.col(3) * 1.5 + gaussian_vector(n, rng, nd));
  const Screening sc = marginal_screen_event(X, y, 2);
  for (Eigen::Index k = 0; k < sc.outcome.eta.rows(); ++k) {
    const Vector eta = sc.outcome.eta.row(k).transpose();
    const TruncationBounds tb = truncation_bounds(sc.event, eta, 1.0, y);
    const double t = eta.dot(y);
    CHECK(tb.v_minus <= t);
    CHECK(t <= tb.v_plus);
    const Vector c = eta / eta.squaredNorm();
    const Vector z = y - c * t;
    auto at = [&](double v) { return contains(sc.event, z + c * v, 1e-9); };
    if (std::isfinite(tb.v_minus)) {
      CHECK(at(tb.v_minus + 1e-6));
      CHECK_FALSE(at(tb.v_minus - 1e-3));
    }
    if (std::isfinite(tb.v_plus)) {
      CHECK(at(tb.v_plus - 1e-6));
      CHECK_FALSE(at(tb.v_plus + 1e-3));
    }
  }
  CHECK_THROWS_AS(truncation_bounds(sc.event, Vector::Zero(n), 1.0, y), DomainError);
  CHECK_THROWS_AS(truncation_bounds(sc.event, sc.outcome.eta.row(0).transpose(), 0.0, y),
                  DomainError);
}

TEST_CASE("data outside the event is a consistency error") {
  // y1 <= 0 and y1 >= 1 cannot both hold.
  Matrix A(2, 2);
  A << 1, 0, -1, 0;
  PolyhedralEvent e{A, Vector(Vector::Zero(2))};
  e.b[1] = -1.0;
  CHECK_THROWS_AS(truncation_bounds(e, Vector::Unit(2, 0), 1.0, Vector::Ones(2)),
                  ConsistencyError);
}

TEST_CASE("sample mean event is mean > threshold") {
  const PolyhedralEvent e = sample_mean_event(4, 2, 1.0);
  Vector y(8);
  y << 1, 1, 1, 2, /* col 2 */ 3, 1, 1, 0;
  CHECK(contains(e, y));
  y[3] = 0.5;
  CHECK_FALSE(contains(e, y));
}

TEST_CASE("matrix CSV ingestion") {
  std::vector<std::string> header;
  const auto ok = temp_file("carve_ok.csv", "a,b\n1,2\n3,4.5\n");
  const Matrix m = read_matrix_csv(ok, &header);
  CHECK(header == std::vector<std::string>{"a", "b"});
  CHECK(m.rows() == 2);
  CHECK(m(1, 1) == 4.5);

  const auto missing = temp_file("carve_missing.csv", "1,2\n3,\n");
  try {
    read_matrix_csv(missing);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(read_matrix_csv(temp_file("carve_nan.csv", "1,nan\n")), IoError);
  CHECK_THROWS_AS(read_matrix_csv("/nonexistent/x.csv"), IoError);

  const auto out = std::filesystem::temp_directory_path() / "carve_roundtrip.csv";
  write_matrix_csv(out, m, {"a", "b"});
  CHECK(read_matrix_csv(out) == m);
}

TEST_CASE("standardization and rank checks") {
  Matrix X = gaussian_matrix(20, 3, 17);
  const Matrix Xs = standardize_columns(X);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(Xs.col(j).mean()) < 1e-12);
    CHECK(Xs.col(j).squaredNorm() / 20 == doctest::Approx(1.0).epsilon(1e-12));
  }
  X.col(1).setConstant(2.0);
  CHECK_THROWS_AS(standardize_columns(X), RankError);

  Matrix D = gaussian_matrix(20, 3, 18);
  D.col(2) = D.col(0);
  Vector beta = Vector::Ones(3);
  CHECK_THROWS_AS(lasso_outcome(D, beta), RankError);
}
