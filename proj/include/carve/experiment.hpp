#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "carve/carving.hpp"
#include "carve/report.hpp"

namespace carve {

// ---- Sample-mean power surface -------------------------------------------

struct PowerRow {
  int n = 0;
  int n_a = 0;
  double mu = 0.0;
  double crit = kNaN;  // carving critical value under mu = 0
  double carve = kNaN;
  double split = kNaN;
  double posi = kNaN;
  bool ok = true;  // false when the truncated mass underflowed
};

// Analytic one-sided power at level alpha for the mean of one coordinate
// selected by mean_A > threshold, at each mu in mu_grid.
std::vector<PowerRow> power_sample_mean(int n, int n_a, double sigma2, double alpha,
                                        const std::vector<double>& mu_grid,
                                        double threshold = 1.0);

Table to_table(const std::vector<PowerRow>& rows);

// ---- High-dimensional regression grid ------------------------------------

struct SimConfig {
  int n = 100;
  int p = 150;
  int s = 5;
  double sigma2 = 1.0;
  double alpha = 0.1;
  std::vector<double> snr_grid{-1.0, 0.0, 1.0};  // log10 SNR
  std::vector<double> frac_grid{0.15, 0.20, 0.25};
  int n_sims = 100;
  std::uint64_t base_seed = 1;
  Algorithm algorithm = Algorithm::lasso;
  double lam_frac = 0.725;
  int k = 10;
  int threads = 0;  // 0: hardware concurrency
};

void validate(const SimConfig& c);

// Full-size grid: seven SNR points and 500 runs.
SimConfig full_scale(SimConfig c);

enum class Metric { type1, type2, precision, coverage };
std::string_view to_string(Metric m);

// One aggregated rate for a (snr, frac_b, method) cell. posi does not split
// and is reported with frac_b = 0.
struct SimRecord {
  double snr = 0.0;
  double frac_b = 0.0;
  int run = 0;  // runs aggregated
  std::string method;
  Metric metric = Metric::type1;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double value = kNaN;
  double ci_lo = kNaN;
  double ci_hi = kNaN;
  int failed_runs = 0;
};

// Hypothesis counts from one method in one run.
struct Tally {
  std::uint64_t null_tested = 0, null_rejected = 0;
  std::uint64_t true_tested = 0, true_rejected = 0;
  std::uint64_t selected = 0, true_selected = 0;
  std::uint64_t covered = 0, intervals = 0;
  int failed = 0;

  Tally& operator+=(const Tally& o);
};

// Data for run `run`: X with i.i.d. N(0, 1) entries, beta0 with s equal
// positive entries giving var(X beta0) / sigma2 = 10^log10_snr, y = X beta0 + e.
struct SimData {
  Matrix X;
  Vector beta0;
  Vector y;
};
std::uint64_t run_seed(std::uint64_t base_seed, int run);
SimData simulate_regression(const SimConfig& c, double log10_snr, std::uint64_t seed);

// Tally of `results` against the truth. `truth` is on the scale of the
// standardized design; features below s are the true signals.
Tally tally(const std::vector<CarveResult>& results, const std::vector<int>& selected,
            const Vector& truth, int s, double alpha);

std::vector<SimRecord> run_hdr_grid(const SimConfig& c);
std::vector<SimRecord> aggregate(double snr, double frac_b, const std::string& method,
                                 const Tally& t, int runs);

Table to_table(const std::vector<SimRecord>& records);
std::vector<SimRecord> sim_records_from_table(const Table& t);

// ---- Diabetes analysis ----------------------------------------------------

enum class LambdaReading {
  fraction,  // lam = value * lambda_max
  literal,   // lam = value on unit-norm columns, i.e. value * sqrt(n) here
};

struct DiabetesOptions {
  std::filesystem::path data;
  double lam_value = 0.25;
  LambdaReading reading = LambdaReading::fraction;
  std::vector<double> frac_grid{0.15, 0.20, 0.25};
  double alpha = 0.1;
  std::uint64_t seed = 1;
  std::string target = "target";
};

struct DiabetesReport {
  std::vector<std::string> features;
  double lam = kNaN;  // on standardized columns, (1 / 2n) convention
  double sigma2 = kNaN;
  int cv_support = 0;
  std::vector<int> full_selection;
  // method, frac_b, feature, estimate, ci_lo, ci_hi, pvalue, significant
  Table cis;
};

DiabetesReport analyze_diabetes(const DiabetesOptions& opt);

// Carving analysis of user data, all four methods on one split.
Table to_table(const std::vector<CarveResult>& results,
               const std::vector<std::string>& feature_names = {});

}  // namespace carve
