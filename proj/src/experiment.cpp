#include "carve/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <thread>

#include "carve/errors.hpp"
#include "carve/normal.hpp"
#include "carve/rng.hpp"
#include "carve/sntn.hpp"
#include "carve/stats.hpp"

namespace carve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kRunStride = 1000003;

// Methods in the order they are stored per cell.
enum Slot { kCarve = 0, kSplit = 1, kNaive = 2, kSlots = 3 };
constexpr const char* kSlotNames[] = {"carve", "split", "naive"};

CarveConfig selection_config(const SimConfig& c, double frac_b) {
  CarveConfig cfg;
  cfg.frac_b = frac_b;
  cfg.alpha = c.alpha;
  cfg.sigma2 = c.sigma2;
  cfg.algorithm = c.algorithm;
  if (c.algorithm == Algorithm::lasso) {
    cfg.lam_frac = c.lam_frac;
  } else {
    cfg.k = c.k;
  }
  return cfg;
}

// Per-run tallies: for each snr, one posi tally and kSlots per fraction.
struct RunTallies {
  std::vector<Tally> posi;
  std::vector<std::vector<std::array<Tally, kSlots>>> cells;
};

RunTallies simulate_run(const SimConfig& c, int run) {
  RunTallies out;
  const std::uint64_t seed = run_seed(c.base_seed, run);
  for (double snr : c.snr_grid) {
    const SimData d = simulate_regression(c, snr, seed);
    const Matrix Xs = standardize_columns(d.X);
    Vector truth(c.p);
    const Matrix Xc = center_columns(d.X);
    for (int j = 0; j < c.p; ++j)
      truth[j] = d.beta0[j] * Xc.col(j).norm() / std::sqrt(static_cast<double>(c.n));

    Tally posi;
    try {
      const PosiRun pr = posi_run(Xs, d.y, selection_config(c, c.frac_grid.front()));
      posi = tally(pr.results, pr.selection.outcome.M, truth, c.s, c.alpha);
    } catch (const Error&) {
      posi.failed = 1;
    }
    out.posi.push_back(posi);

    std::vector<std::array<Tally, kSlots>> per_frac;
    for (std::size_t f = 0; f < c.frac_grid.size(); ++f) {
      std::array<Tally, kSlots> t{};
      try {
        const DataSplit split = split_data(c.n, c.frac_grid[f], derive_seed(seed, 1 + f));
        const CarveRun cr = carve_run(Xs, d.y, split, selection_config(c, c.frac_grid[f]));
        const auto& M = cr.selection.outcome.M;
        t[kCarve] = tally(cr.carve, M, truth, c.s, c.alpha);
        t[kSplit] = tally(cr.split_results, M, truth, c.s, c.alpha);
        t[kNaive] = tally(cr.naive, M, truth, c.s, c.alpha);
      } catch (const Error&) {
        for (auto& x : t) x.failed = 1;
      }
      per_frac.push_back(t);
    }
    out.cells.push_back(std::move(per_frac));
  }
  return out;
}

void add_record(std::vector<SimRecord>& out, double snr, double frac_b, const std::string& method,
                Metric metric, std::uint64_t k, std::uint64_t n, int runs, int failed) {
  if (n == 0) return;
  SimRecord r;
  r.snr = snr;
  r.frac_b = frac_b;
  r.run = runs;
  r.method = method;
  r.metric = metric;
  r.successes = k;
  r.trials = n;
  r.value = static_cast<double>(k) / static_cast<double>(n);
  const Interval ci = clopper_pearson(k, n, 0.95);
  r.ci_lo = ci.lo;
  r.ci_hi = ci.hi;
  r.failed_runs = failed;
  out.push_back(r);
}

Metric parse_metric(const std::string& s) {
  for (Metric m : {Metric::type1, Metric::type2, Metric::precision, Metric::coverage})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown metric '" + s + "'");
}

}  // namespace

// ---- Sample-mean power ----------------------------------------------------

std::vector<PowerRow> power_sample_mean(int n, int n_a, double sigma2, double alpha,
                                        const std::vector<double>& mu_grid, double threshold) {
  if (n_a < 1 || n_a >= n) throw ConfigError("power_sample_mean: need 1 <= n_a < n");
  if (!(sigma2 > 0.0)) throw DomainError("power_sample_mean: sigma2 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("power_sample_mean: alpha must lie in (0, 1)");
  const int n_b = n - n_a;
  const double nd = n;
  auto sntn_at = [&](double mu) {
    return canonicalize({mu, sigma2 / n_b, mu, sigma2 / n_a, threshold, kInf, n_b / nd, n_a / nd});
  };
  const double z = std_norm_ppf(1.0 - alpha);

  double crit = kNaN, posi_crit = kNaN;
  bool ok = true;
  try {
    crit = sntn_ppf(1.0 - alpha, sntn_at(0.0), 1e-12);
  } catch (const Error&) {
    ok = false;
  }
  const TruncNormParams posi_null{0.0, sigma2 / n, threshold, kInf};
  try {
    posi_crit = tnorm_ppf(1.0 - alpha, posi_null);
  } catch (const Error&) {
  }

  std::vector<PowerRow> rows;
  for (double mu : mu_grid) {
    PowerRow r;
    r.n = n;
    r.n_a = n_a;
    r.mu = mu;
    r.crit = crit;
    r.ok = ok;
    r.split = std_norm_cdf(mu * std::sqrt(static_cast<double>(n_b) / sigma2) - z);
    if (ok) {
      try {
        r.carve = sntn_sf(crit, sntn_at(mu));
      } catch (const Error&) {
        r.ok = false;
      }
    }
    if (std::isfinite(posi_crit)) {
      try {
        r.posi = tnorm_sf(posi_crit, {mu, sigma2 / n, threshold, kInf});
      } catch (const Error&) {
      }
    }
    rows.push_back(r);
  }
  return rows;
}

Table to_table(const std::vector<PowerRow>& rows) {
  Table t;
  t.columns = {"n", "n_a", "n_b", "mu", "crit", "carve_power", "split_power", "posi_power", "ok"};
  for (const auto& r : rows) {
    t.rows.push_back({std::int64_t{r.n}, std::int64_t{r.n_a}, std::int64_t{r.n - r.n_a}, r.mu,
                      r.crit, r.carve, r.split, r.posi, std::int64_t{r.ok ? 1 : 0}});
  }
  return t;
}

// ---- Regression grid --------------------------------------------------------

void validate(const SimConfig& c) {
  if (c.n < 2 || c.p < 1) throw ConfigError("sim: need n >= 2 and p >= 1");
  if (c.s < 0 || c.s > std::min(c.n, c.p)) throw ConfigError("sim: need 0 <= s <= min(n, p)");
  if (!(c.sigma2 > 0.0)) throw ConfigError("sim: sigma2 must be positive");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("sim: alpha must lie in (0, 1)");
  if (c.n_sims < 1) throw ConfigError("sim: n_sims must be >= 1");
  if (c.snr_grid.empty() || c.frac_grid.empty()) throw ConfigError("sim: empty grid");
  for (double f : c.frac_grid)
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("sim: fractions must lie in (0, 1)");
  if (c.algorithm == Algorithm::sample_mean) throw ConfigError("sim: regression grid needs lasso or screening");
  if (c.algorithm == Algorithm::lasso && !(c.lam_frac > 0.0 && c.lam_frac <= 1.0))
    throw ConfigError("sim: lam_frac must lie in (0, 1]");
  if (c.algorithm == Algorithm::marginal_screen && (c.k < 1 || c.k > c.p))
    throw ConfigError("sim: need 1 <= k <= p");
}

SimConfig full_scale(SimConfig c) {
  c.snr_grid = {-1.0, -2.0 / 3, -1.0 / 3, 0.0, 1.0 / 3, 2.0 / 3, 1.0};
  c.n_sims = 500;
  return c;
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::type1: return "type1";
    case Metric::type2: return "type2";
    case Metric::precision: return "precision";
    case Metric::coverage: return "coverage";
  }
  return "unknown";
}

Tally& Tally::operator+=(const Tally& o) {
  null_tested += o.null_tested;
  null_rejected += o.null_rejected;
  true_tested += o.true_tested;
  true_rejected += o.true_rejected;
  selected += o.selected;
  true_selected += o.true_selected;
  covered += o.covered;
  intervals += o.intervals;
  failed += o.failed;
  return *this;
}

std::uint64_t run_seed(std::uint64_t base_seed, int run) {
  return base_seed + kRunStride * static_cast<std::uint64_t>(run);
}

SimData simulate_regression(const SimConfig& c, double log10_snr, std::uint64_t seed) {
  CounterRng rng(seed);
  std::normal_distribution<double> nd;
  SimData d;
  d.X.resize(c.n, c.p);
  for (int j = 0; j < c.p; ++j)
    for (int i = 0; i < c.n; ++i) d.X(i, j) = nd(rng);
  d.beta0 = Vector::Zero(c.p);
  if (c.s > 0) {
    const double coef = std::sqrt(std::pow(10.0, log10_snr) * c.sigma2 / c.s);
    d.beta0.head(c.s).setConstant(coef);
  }
  Vector noise(c.n);
  const double sd = std::sqrt(c.sigma2);
  for (int i = 0; i < c.n; ++i) noise[i] = sd * nd(rng);
  d.y = d.X * d.beta0 + noise;
  return d;
}

Tally tally(const std::vector<CarveResult>& results, const std::vector<int>& selected,
            const Vector& truth, int s, double alpha) {
  Tally t;
  t.selected = selected.size();
  for (int j : selected) t.true_selected += j < s;
  for (const auto& r : results) {
    const bool reject = r.pvalue <= alpha;
    if (r.feature < s) {
      ++t.true_tested;
      t.true_rejected += reject;
    } else {
      ++t.null_tested;
      t.null_rejected += reject;
    }
    ++t.intervals;
    const double b = truth[r.feature];
    t.covered += r.ci.lo <= b && b <= r.ci.hi;
  }
  return t;
}

std::vector<SimRecord> aggregate(double snr, double frac_b, const std::string& method,
                                 const Tally& t, int runs) {
  std::vector<SimRecord> out;
  add_record(out, snr, frac_b, method, Metric::type1, t.null_rejected, t.null_tested, runs, t.failed);
  add_record(out, snr, frac_b, method, Metric::type2, t.true_tested - t.true_rejected,
             t.true_tested, runs, t.failed);
  add_record(out, snr, frac_b, method, Metric::precision, t.true_selected, t.selected, runs,
             t.failed);
  add_record(out, snr, frac_b, method, Metric::coverage, t.covered, t.intervals, runs, t.failed);
  return out;
}

std::vector<SimRecord> run_hdr_grid(const SimConfig& c) {
  validate(c);
  std::vector<RunTallies> runs(static_cast<std::size_t>(c.n_sims));
  int workers = c.threads > 0 ? c.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, c.n_sims);
  if (workers == 1) {
    for (int r = 0; r < c.n_sims; ++r) runs[r] = simulate_run(c, r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < c.n_sims; r += workers) runs[r] = simulate_run(c, r);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Deterministic fold in run order.
  std::vector<SimRecord> out;
  for (std::size_t si = 0; si < c.snr_grid.size(); ++si) {
    Tally posi;
    for (const auto& r : runs) posi += r.posi[si];
    for (auto& rec : aggregate(c.snr_grid[si], 0.0, "posi", posi, c.n_sims)) out.push_back(rec);
    for (std::size_t f = 0; f < c.frac_grid.size(); ++f) {
      for (int slot = 0; slot < kSlots; ++slot) {
        Tally t;
        for (const auto& r : runs) t += r.cells[si][f][slot];
        for (auto& rec : aggregate(c.snr_grid[si], c.frac_grid[f], kSlotNames[slot], t, c.n_sims))
          out.push_back(rec);
      }
    }
  }
  return out;
}

Table to_table(const std::vector<SimRecord>& records) {
  Table t;
  t.columns = {"snr", "frac_b", "run", "method", "metric", "successes", "trials",
               "value", "ci_lo", "ci_hi", "failed_runs"};
  for (const auto& r : records) {
    t.rows.push_back({r.snr, r.frac_b, std::int64_t{r.run}, r.method,
                      std::string(to_string(r.metric)), static_cast<std::int64_t>(r.successes),
                      static_cast<std::int64_t>(r.trials), r.value, r.ci_lo, r.ci_hi,
                      std::int64_t{r.failed_runs}});
  }
  return t;
}

std::vector<SimRecord> sim_records_from_table(const Table& t) {
  std::vector<SimRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    SimRecord r;
    r.snr = t.number(i, "snr");
    r.frac_b = t.number(i, "frac_b");
    r.run = static_cast<int>(t.number(i, "run"));
    r.method = t.text(i, "method");
    r.metric = parse_metric(t.text(i, "metric"));
    r.successes = static_cast<std::uint64_t>(t.number(i, "successes"));
    r.trials = static_cast<std::uint64_t>(t.number(i, "trials"));
    r.value = t.number(i, "value");
    r.ci_lo = t.number(i, "ci_lo");
    r.ci_hi = t.number(i, "ci_hi");
    r.failed_runs = static_cast<int>(t.number(i, "failed_runs"));
    out.push_back(r);
  }
  return out;
}

// ---- Diabetes -----------------------------------------------------------------

Table to_table(const std::vector<CarveResult>& results,
               const std::vector<std::string>& feature_names) {
  Table t;
  t.columns = {"feature", "method", "estimate", "pvalue", "ci_lo",
               "ci_hi",   "v_minus", "v_plus", "rho"};
  for (const auto& r : results) {
    Cell feature = std::int64_t{r.feature};
    if (r.feature >= 0 && static_cast<std::size_t>(r.feature) < feature_names.size())
      feature = feature_names[r.feature];
    t.rows.push_back({feature, std::string(to_string(r.method)), r.estimate, r.pvalue, r.ci.lo,
                      r.ci.hi, r.v_minus, r.v_plus, r.rho});
  }
  return t;
}

DiabetesReport analyze_diabetes(const DiabetesOptions& opt) {
  std::vector<std::string> header;
  const Matrix raw = read_matrix_csv(opt.data, &header);
  if (header.size() != static_cast<std::size_t>(raw.cols()))
    throw IoError("diabetes: a header row naming the columns is required");
  const auto tcol = std::find(header.begin(), header.end(), opt.target);
  if (tcol == header.end()) throw IoError("diabetes: no column named '" + opt.target + "'");
  const auto target = static_cast<Eigen::Index>(tcol - header.begin());

  DiabetesReport rep;
  std::vector<int> feature_cols;
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    if (j == target) continue;
    feature_cols.push_back(static_cast<int>(j));
    rep.features.push_back(header[j]);
  }
  Matrix X(raw.rows(), static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t k = 0; k < feature_cols.size(); ++k) X.col(k) = raw.col(feature_cols[k]);
  const Vector y = raw.col(target);
  const Matrix Xs = standardize_columns(X);
  const auto n = static_cast<double>(Xs.rows());

  const double lmax_full = lambda_max(Xs, center(y));
  rep.lam = opt.reading == LambdaReading::fraction ? opt.lam_value * lmax_full
                                                   : opt.lam_value * std::sqrt(n);
  const SigmaEstimate sig = estimate_sigma2(Xs, y, opt.seed);
  rep.sigma2 = sig.sigma2;
  rep.cv_support = sig.support;

  rep.cis.columns = {"method", "frac_b", "feature", "estimate", "ci_lo", "ci_hi", "pvalue",
                     "significant"};
  auto emit = [&](const std::vector<CarveResult>& rs, double frac) {
    for (const auto& r : rs) {
      rep.cis.rows.push_back({std::string(to_string(r.method)), frac, rep.features[r.feature],
                              r.estimate, r.ci.lo, r.ci.hi, r.pvalue,
                              std::int64_t{r.pvalue <= opt.alpha ? 1 : 0}});
    }
  };

  CarveConfig cfg;
  cfg.alpha = opt.alpha;
  cfg.sigma2 = rep.sigma2;
  cfg.lam_frac = std::min(1.0, rep.lam / lmax_full);
  const PosiRun full = posi_run(Xs, y, cfg);
  rep.full_selection = full.selection.outcome.M;
  emit(full.results, 0.0);

  for (std::size_t f = 0; f < opt.frac_grid.size(); ++f) {
    cfg.frac_b = opt.frac_grid[f];
    const DataSplit split = split_data(static_cast<int>(n), cfg.frac_b, derive_seed(opt.seed, 1 + f));
    Matrix XA(static_cast<Eigen::Index>(split.idx_A.size()), Xs.cols());
    Vector yA(XA.rows());
    for (std::size_t i = 0; i < split.idx_A.size(); ++i) {
      XA.row(i) = Xs.row(split.idx_A[i]);
      yA[i] = y[split.idx_A[i]];
    }
    const double lmax_a = lambda_max(center_columns(XA), center(yA));
    cfg.lam_frac = std::min(1.0, rep.lam / lmax_a);
    const CarveRun run = carve_run(Xs, y, split, cfg);
    emit(run.carve, cfg.frac_b);
    emit(run.split_results, cfg.frac_b);
  }
  return rep;
}

}  // namespace carve
