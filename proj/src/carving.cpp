#include "carve/carving.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "carve/errors.hpp"
#include "carve/normal.hpp"
#include "carve/rng.hpp"
#include "carve/sntn.hpp"

namespace carve {

namespace {

Matrix rows_of(const Matrix& X, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = X.row(idx[i]);
  return out;
}

Vector rows_of(const Vector& y, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
  return out;
}

Matrix cols_of(const Matrix& X, const std::vector<int>& idx) {
  Matrix out(X.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(k) = X.col(idx[k]);
  return out;
}

void check_alpha_sigma(double sigma2, double alpha) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw DomainError("inference: sigma2 must be positive and finite");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("inference: alpha must lie in (0, 1)");
}

double two_sided_normal_p(double z) {
  return std::min(1.0, 2.0 * std_norm_sf(std::abs(z)));
}

double two_sided_tn_p(double x, const TruncNormParams& p) {
  return std::min(1.0, 2.0 * std::min(tnorm_cdf(x, p), tnorm_sf(x, p)));
}

// OLS z-tests of the refit on M.
std::vector<CarveResult> z_tests(const Matrix& X, const Vector& y, const std::vector<int>& M,
                                 double sigma2, double alpha, Method method) {
  check_alpha_sigma(sigma2, alpha);
  if (X.rows() != y.size()) throw ConfigError("inference: X and y disagree in rows");
  std::vector<CarveResult> out;
  if (M.empty()) return out;
  if (X.rows() <= static_cast<Eigen::Index>(M.size())) {
    std::ostringstream os;
    os << "inference: " << X.rows() << " rows cannot support " << M.size() << " coefficients";
    throw RankError(os.str());
  }
  const Matrix XM = cols_of(X, M);
  Eigen::ColPivHouseholderQR<Matrix> qr(XM);
  qr.setThreshold(1e-10);
  if (qr.rank() < XM.cols()) throw RankError("inference: refit design is rank deficient");
  const Matrix gram_inv =
      (XM.transpose() * XM).ldlt().solve(Matrix::Identity(XM.cols(), XM.cols()));
  const Vector beta = gram_inv * (XM.transpose() * y);
  const double zq = std_norm_ppf(1.0 - 0.5 * alpha);
  for (std::size_t k = 0; k < M.size(); ++k) {
    const double se = std::sqrt(sigma2 * gram_inv(k, k));
    CarveResult r;
    r.feature = M[k];
    r.method = method;
    r.estimate = beta[k];
    if (method == Method::split) r.beta_split = beta[k];
    r.pvalue = two_sided_normal_p(beta[k] / se);
    r.ci = {beta[k] - zq * se, beta[k] + zq * se};
    out.push_back(r);
  }
  return out;
}

// Pieces of the PoSI pivot for each selected coordinate.
struct TruncatedPiece {
  double estimate;
  double variance;
  TruncationBounds bounds;
};

std::vector<TruncatedPiece> truncated_pieces(const Vector& yA, const SelectionOutcome& outcome,
                                             const PolyhedralEvent& event, double sigma2) {
  std::vector<TruncatedPiece> out;
  for (std::size_t k = 0; k < outcome.M.size(); ++k) {
    const Vector eta = outcome.eta.row(static_cast<Eigen::Index>(k)).transpose();
    out.push_back({eta.dot(yA), sigma2 * eta.squaredNorm(),
                   truncation_bounds(event, eta, sigma2, yA)});
  }
  return out;
}

double resolve_sigma2(const Matrix& X, const Vector& y, const CarveConfig& config,
                      std::uint64_t seed) {
  if (config.sigma2) return *config.sigma2;
  return estimate_sigma2(X, y, derive_seed(seed, 7)).sigma2;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::lasso: return "lasso";
    case Algorithm::marginal_screen: return "marginal_screen";
    case Algorithm::sample_mean: return "sample_mean";
  }
  return "unknown";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::posi: return "posi";
    case Method::split: return "split";
    case Method::carve: return "carve";
    case Method::naive: return "naive";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "lasso") return Algorithm::lasso;
  if (name == "marginal_screen" || name == "screen") return Algorithm::marginal_screen;
  if (name == "sample_mean") return Algorithm::sample_mean;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

DataSplit split_data(int n, double frac_b, std::uint64_t seed) {
  if (!(frac_b > 0.0 && frac_b < 1.0)) throw ConfigError("split_data: frac_b must lie in (0, 1)");
  const int nb = static_cast<int>(std::floor(frac_b * n + 0.5));
  if (nb < 1 || n - nb < 1) {
    std::ostringstream os;
    os << "split_data: n = " << n << " with frac_b = " << frac_b << " leaves an empty block";
    throw ConfigError(os.str());
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform() * (i + 1));
    std::swap(perm[i], perm[std::min(j, i)]);
  }
  DataSplit s;
  s.seed = seed;
  s.idx_B.assign(perm.begin(), perm.begin() + nb);
  s.idx_A.assign(perm.begin() + nb, perm.end());
  std::sort(s.idx_A.begin(), s.idx_A.end());
  std::sort(s.idx_B.begin(), s.idx_B.end());
  return s;
}

void validate(const CarveConfig& c) {
  if (!(c.frac_b > 0.0 && c.frac_b < 1.0)) throw ConfigError("config: frac_b must lie in (0, 1)");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("config: alpha must lie in (0, 1)");
  if (c.sigma2 && !(*c.sigma2 > 0.0)) throw ConfigError("config: sigma2 must be positive");
  switch (c.algorithm) {
    case Algorithm::lasso:
      if (!c.lam_frac || c.k) throw ConfigError("config: lasso takes lam_frac and no k");
      if (!(*c.lam_frac > 0.0 && *c.lam_frac <= 1.0))
        throw ConfigError("config: lam_frac must lie in (0, 1]");
      break;
    case Algorithm::marginal_screen:
      if (!c.k || c.lam_frac) throw ConfigError("config: screening takes k and no lam_frac");
      if (*c.k < 1) throw ConfigError("config: k must be positive");
      break;
    case Algorithm::sample_mean:
      if (c.k || c.lam_frac) throw ConfigError("config: sample_mean takes neither k nor lam_frac");
      break;
  }
}

Selection select_features(const Matrix& X, const Vector& y, const CarveConfig& config) {
  Selection s;
  switch (config.algorithm) {
    case Algorithm::lasso: {
      s.lam = *config.lam_frac * lambda_max(X, y);
      if (!(s.lam > 0.0)) {
        s.outcome.eta = Matrix(0, X.rows());
        return s;
      }
      const LassoFit fit = lasso_fit(X, y, s.lam);
      s.outcome = lasso_outcome(X, fit.beta);
      s.event = lasso_event(X, y, s.lam, s.outcome);
      return s;
    }
    case Algorithm::marginal_screen: {
      Screening sc = marginal_screen_event(X, y, *config.k);
      s.outcome = std::move(sc.outcome);
      s.event = std::move(sc.event);
      return s;
    }
    case Algorithm::sample_mean:
      break;
  }
  throw ConfigError("select_features: sample_mean selection has no regression form");
}

std::vector<CarveResult> posi_inference(const Matrix& XA, const Vector& yA,
                                        const SelectionOutcome& outcome,
                                        const PolyhedralEvent& event, double sigma2,
                                        double alpha) {
  check_alpha_sigma(sigma2, alpha);
  (void)XA;
  std::vector<CarveResult> out;
  const auto pieces = truncated_pieces(yA, outcome, event, sigma2);
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& pc = pieces[k];
    CarveResult r;
    r.feature = outcome.M[k];
    r.method = Method::posi;
    r.estimate = r.beta_posi = pc.estimate;
    r.v_minus = pc.bounds.v_minus;
    r.v_plus = pc.bounds.v_plus;
    r.pvalue = two_sided_tn_p(pc.estimate, {0.0, pc.variance, r.v_minus, r.v_plus});
    r.ci = tnorm_ci(pc.estimate, pc.variance, r.v_minus, r.v_plus, alpha);
    out.push_back(r);
  }
  return out;
}

std::vector<CarveResult> split_inference(const Matrix& XB, const Vector& yB,
                                         const std::vector<int>& M, double sigma2,
                                         double alpha) {
  return z_tests(XB, yB, M, sigma2, alpha, Method::split);
}

std::vector<CarveResult> naive_ols_inference(const Matrix& XA, const Vector& yA,
                                             const std::vector<int>& M, double sigma2,
                                             double alpha) {
  return z_tests(XA, yA, M, sigma2, alpha, Method::naive);
}

CarveRun carve_run(const Matrix& X, const Vector& y, const DataSplit& split,
                   const CarveConfig& config) {
  validate(config);
  if (X.rows() != y.size()) throw ConfigError("carve: X and y disagree in rows");
  if (config.algorithm == Algorithm::sample_mean)
    throw ConfigError("carve: use sample_mean_carve for the sample-mean design");
  CarveRun run;
  run.split = split;
  run.sigma2 = resolve_sigma2(X, y, config, split.seed);
  const double alpha = config.alpha;
  const Matrix XA = center_columns(rows_of(X, split.idx_A));
  const Vector yA = center(rows_of(y, split.idx_A));
  const Matrix XB = center_columns(rows_of(X, split.idx_B));
  const Vector yB = center(rows_of(y, split.idx_B));
  const double nA = static_cast<double>(split.idx_A.size());
  const double nB = static_cast<double>(split.idx_B.size());
  const double n = nA + nB;

  run.selection = select_features(XA, yA, config);
  const auto& M = run.selection.outcome.M;
  if (M.empty()) return run;
  run.split_results = split_inference(XB, yB, M, run.sigma2, alpha);
  run.naive = naive_ols_inference(XA, yA, M, run.sigma2, alpha);
  const auto pieces = truncated_pieces(yA, run.selection.outcome, run.selection.event, run.sigma2);

  const Matrix XBM = cols_of(XB, M);
  const Matrix gram_inv_B =
      (XBM.transpose() * XBM).ldlt().solve(Matrix::Identity(XBM.cols(), XBM.cols()));
  for (std::size_t k = 0; k < M.size(); ++k) {
    const auto& pc = pieces[k];
    SntnInputs tmpl;
    tmpl.tau1_2 = run.sigma2 * gram_inv_B(k, k);
    tmpl.tau2_2 = pc.variance;
    tmpl.a = pc.bounds.v_minus;
    tmpl.b = pc.bounds.v_plus;
    tmpl.c1 = nB / n;
    tmpl.c2 = nA / n;
    const SntnCanonical null = canonicalize(tmpl);

    CarveResult r;
    r.feature = M[k];
    r.method = Method::carve;
    r.beta_split = run.split_results[k].estimate;
    r.beta_posi = pc.estimate;
    r.beta_carve = tmpl.c2 * r.beta_posi + tmpl.c1 * r.beta_split;
    r.estimate = r.beta_carve;
    r.v_minus = tmpl.a;
    r.v_plus = tmpl.b;
    r.rho = null.rho;
    r.pvalue = sntn_pvalue(r.beta_carve, null, Tail::two_sided);
    r.ci = sntn_ci(r.beta_carve, tmpl, alpha);
    run.carve.push_back(r);
  }
  return run;
}

std::vector<CarveResult> carve_inference(const Matrix& X, const Vector& y,
                                         const DataSplit& split, const CarveConfig& config) {
  return carve_run(X, y, split, config).carve;
}

PosiRun posi_run(const Matrix& X, const Vector& y, const CarveConfig& config) {
  validate(config);
  if (X.rows() != y.size()) throw ConfigError("posi: X and y disagree in rows");
  PosiRun run;
  run.sigma2 = resolve_sigma2(X, y, config, 0);
  const Matrix Xc = center_columns(X);
  const Vector yc = center(y);
  run.selection = select_features(Xc, yc, config);
  run.results = posi_inference(Xc, yc, run.selection.outcome, run.selection.event, run.sigma2,
                               config.alpha);
  return run;
}

SigmaEstimate estimate_sigma2(const Matrix& X, const Vector& y, std::uint64_t seed, int folds) {
  const Eigen::Index n = X.rows();
  if (folds < 2 || n < 2 * folds) throw ConfigError("estimate_sigma2: too few rows for CV");
  const Matrix Xc = center_columns(X);
  const Vector yc = center(y);
  const double lmax = lambda_max(Xc, yc);
  if (!(lmax > 0.0)) throw DomainError("estimate_sigma2: response is constant");

  constexpr int kPath = 40;
  std::vector<double> path(kPath);
  for (int i = 0; i < kPath; ++i) path[i] = lmax * std::pow(1e-3, i / double(kPath - 1));

  // Fold labels from a seeded shuffle.
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.uniform() * double(i + 1));
    std::swap(perm[i], perm[std::min(j, i)]);
  }
  std::vector<double> cv(kPath, 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, test;
    for (Eigen::Index i = 0; i < n; ++i) (i % folds == f ? test : train).push_back(perm[i]);
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    const Matrix Xtr = rows_of(X, train), Xte = rows_of(X, test);
    const Vector ytr = rows_of(y, train), yte = rows_of(y, test);
    const Eigen::RowVectorXd xm = Xtr.colwise().mean();
    const double ym = ytr.mean();
    const Matrix Xtr_c = Xtr.rowwise() - xm;
    const Vector ytr_c = ytr.array() - ym;
    for (int i = 0; i < kPath; ++i) {
      const Vector beta = lasso_fit(Xtr_c, ytr_c, path[i]).beta;
      const Vector pred = ((Xte.rowwise() - xm) * beta).array() + ym;
      cv[i] += (yte - pred).squaredNorm();
    }
  }
  const int best = static_cast<int>(std::min_element(cv.begin(), cv.end()) - cv.begin());
  SigmaEstimate est;
  est.lam = path[best];
  const Vector beta = lasso_fit(Xc, yc, est.lam).beta;
  std::vector<int> M;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) M.push_back(static_cast<int>(j));
  est.support = static_cast<int>(M.size());
  const double dof = static_cast<double>(n) - est.support - 1.0;
  if (!(dof > 0.0)) throw RankError("estimate_sigma2: no residual degrees of freedom");
  Vector resid = yc;
  if (!M.empty()) {
    const Matrix XM = cols_of(Xc, M);
    resid -= XM * XM.colPivHouseholderQr().solve(yc);
  }
  est.sigma2 = resid.squaredNorm() / dof;
  return est;
}

std::vector<CarveResult> sample_mean_carve(const Matrix& Y, const DataSplit& split,
                                           double threshold, double sigma2, double alpha) {
  check_alpha_sigma(sigma2, alpha);
  const Matrix YA = rows_of(Y, split.idx_A);
  const Matrix YB = rows_of(Y, split.idx_B);
  const auto nA = static_cast<int>(YA.rows());
  const double n = static_cast<double>(Y.rows());
  const PolyhedralEvent one = sample_mean_event(nA, 1, threshold);
  const Vector eta = Vector::Constant(nA, 1.0 / nA);
  std::vector<CarveResult> out;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    const Vector yA = YA.col(j);
    if (!(yA.mean() > threshold)) continue;
    SntnInputs tmpl;
    tmpl.tau1_2 = sigma2 / static_cast<double>(YB.rows());
    tmpl.tau2_2 = sigma2 / nA;
    const TruncationBounds tb = truncation_bounds(one, eta, sigma2, yA);
    tmpl.a = tb.v_minus;
    tmpl.b = tb.v_plus;
    tmpl.c1 = static_cast<double>(YB.rows()) / n;
    tmpl.c2 = nA / n;
    const SntnCanonical null = canonicalize(tmpl);
    CarveResult r;
    r.feature = static_cast<int>(j);
    r.method = Method::carve;
    r.beta_posi = yA.mean();
    r.beta_split = YB.col(j).mean();
    r.beta_carve = tmpl.c2 * r.beta_posi + tmpl.c1 * r.beta_split;
    r.estimate = r.beta_carve;
    r.v_minus = tb.v_minus;
    r.v_plus = tb.v_plus;
    r.rho = null.rho;
    r.pvalue = sntn_pvalue(r.beta_carve, null, Tail::right);
    r.ci = sntn_ci(r.beta_carve, tmpl, alpha);
    out.push_back(r);
  }
  return out;
}

}  // namespace carve
