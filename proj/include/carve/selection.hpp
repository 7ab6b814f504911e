#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace carve {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Numeric CSV, row-major; a non-numeric first row is taken as a header.
// Empty or NaN cells raise IoError naming the offending row and column.
Matrix read_matrix_csv(const std::filesystem::path& path,
                       std::vector<std::string>* header = nullptr);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

// Columns centered and scaled to ||x_j|| / sqrt(n) = 1.
Matrix standardize_columns(const Matrix& X);
Matrix center_columns(const Matrix& X);
Vector center(const Vector& y);

// Minimizer of (1 / 2n) ||y - X beta||^2 + lam ||beta||_1.
struct LassoFit {
  Vector beta;
  int sweeps = 0;
};

struct LassoOptions {
  double tol = 1e-10;  // max coefficient change per sweep
  int max_sweeps = 100000;
};

double lambda_max(const Matrix& X, const Vector& y);
LassoFit lasso_fit(const Matrix& X, const Vector& y, double lam,
                   const LassoOptions& opt = {});

// Rows of eta are the OLS contrasts [(X_M' X_M)^-1 X_M']_j. for the refit.
struct SelectionOutcome {
  std::vector<int> M;
  std::vector<int> signs;
  Matrix eta;
};

// {y : A y <= b}
struct PolyhedralEvent {
  Matrix A;
  Vector b;
};

bool contains(const PolyhedralEvent& e, const Vector& y, double slack = 1e-9);
// Writes A.csv and b.csv into `dir`.
void write_event_csv(const std::filesystem::path& dir, const PolyhedralEvent& e);

// Outcome (M, signs, eta) read off a Lasso solution; throws RankError when
// X_M is rank deficient.
SelectionOutcome lasso_outcome(const Matrix& X, const Vector& beta);
PolyhedralEvent lasso_event(const Matrix& X, const Vector& y, double lam,
                            const SelectionOutcome& outcome);

// Top-k features by |x_j' y|, ties to the lowest index, conditioned on the
// achieved signs.
struct Screening {
  SelectionOutcome outcome;
  PolyhedralEvent event;
};
std::vector<int> top_k(const Matrix& X, const Vector& y, int k);
Screening marginal_screen_event(const Matrix& X, const Vector& y, int k);

// p coordinate means of an n x p sample, y vectorized column by column:
// event {mean_j > threshold for all j}.
PolyhedralEvent sample_mean_event(int n, int p, double threshold);

struct TruncationBounds {
  double v_minus;
  double v_plus;
};

// Range of eta' y over the event with the component of y orthogonal to eta
// (under covariance sigma2 I) held fixed.
TruncationBounds truncation_bounds(const PolyhedralEvent& e, const Vector& eta,
                                   double sigma2, const Vector& y);

}  // namespace carve
