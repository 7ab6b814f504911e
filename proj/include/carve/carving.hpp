#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "carve/selection.hpp"
#include "carve/truncnorm.hpp"

namespace carve {

enum class Algorithm { lasso, marginal_screen, sample_mean };
enum class Method { posi, split, carve, naive };

std::string_view to_string(Algorithm a);
std::string_view to_string(Method m);
Algorithm parse_algorithm(std::string_view name);

// Rows of the screening block A and the inference block B, each sorted.
struct DataSplit {
  std::vector<int> idx_A;
  std::vector<int> idx_B;
  std::uint64_t seed = 0;
};

// n_B = floor(frac_b * n + 1/2); the partition is a seeded shuffle.
DataSplit split_data(int n, double frac_b, std::uint64_t seed);

struct CarveConfig {
  double frac_b = 0.15;
  double alpha = 0.1;
  std::optional<double> sigma2;    // unset: estimate from the data
  std::optional<double> lam_frac;  // lasso: lam = lam_frac * lambda_max
  std::optional<int> k;            // marginal screening
  double threshold = 1.0;          // sample mean
  Algorithm algorithm = Algorithm::lasso;
};

void validate(const CarveConfig& c);

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CarveResult {
  int feature = -1;
  Method method = Method::carve;
  double beta_split = kNaN;
  double beta_posi = kNaN;
  double beta_carve = kNaN;
  double estimate = kNaN;
  double pvalue = kNaN;
  Interval ci{kNaN, kNaN};
  double v_minus = -std::numeric_limits<double>::infinity();
  double v_plus = std::numeric_limits<double>::infinity();
  double rho = kNaN;
};

// Selection on a centered block.
struct Selection {
  SelectionOutcome outcome;
  PolyhedralEvent event;
  double lam = kNaN;
};
Selection select_features(const Matrix& X, const Vector& y, const CarveConfig& config);

// Truncated-normal pivots for eta_j' y on the selecting data.
std::vector<CarveResult> posi_inference(const Matrix& XA, const Vector& yA,
                                        const SelectionOutcome& outcome,
                                        const PolyhedralEvent& event, double sigma2,
                                        double alpha);
// Classical z-tests of the OLS refit on M.
std::vector<CarveResult> split_inference(const Matrix& XB, const Vector& yB,
                                         const std::vector<int>& M, double sigma2,
                                         double alpha);
// Same z-tests on the block that chose M, ignoring selection.
std::vector<CarveResult> naive_ols_inference(const Matrix& XA, const Vector& yA,
                                             const std::vector<int>& M, double sigma2,
                                             double alpha);

// Everything one split produces. X is used as given; y and the columns of X
// are centered within each block.
struct CarveRun {
  DataSplit split;
  Selection selection;
  double sigma2 = kNaN;
  std::vector<CarveResult> carve;
  std::vector<CarveResult> split_results;
  std::vector<CarveResult> naive;
};

CarveRun carve_run(const Matrix& X, const Vector& y, const DataSplit& split,
                   const CarveConfig& config);
std::vector<CarveResult> carve_inference(const Matrix& X, const Vector& y,
                                         const DataSplit& split, const CarveConfig& config);

// Full-data selection and truncated-normal inference.
struct PosiRun {
  Selection selection;
  double sigma2 = kNaN;
  std::vector<CarveResult> results;
};
PosiRun posi_run(const Matrix& X, const Vector& y, const CarveConfig& config);

// Noise variance from a 5-fold cross-validated Lasso refit by OLS on the
// full data: RSS / (n - |M| - 1).
struct SigmaEstimate {
  double sigma2 = kNaN;
  double lam = kNaN;
  int support = 0;
};
SigmaEstimate estimate_sigma2(const Matrix& X, const Vector& y, std::uint64_t seed,
                              int folds = 5);

// Per-coordinate carving for an n x p sample selected by mean_j > threshold
// on block A; one-sided tests of H0: mu_j <= 0.
std::vector<CarveResult> sample_mean_carve(const Matrix& Y, const DataSplit& split,
                                           double threshold, double sigma2, double alpha);

}  // namespace carve
