#include "carve/bvn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <utility>
#include <random>
#include <sstream>

#include "carve/errors.hpp"
#include "carve/normal.hpp"
#include "carve/rng.hpp"
#include "carve/truncnorm.hpp"

namespace carve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRhoLimit = 1.0 - 1e-12;
constexpr int kOwenOrder = 40;

// Owen's T for h >= 0, 0 <= a <= 1 by fixed-order Gauss-Legendre.
double owens_t_small_a(double h, double a) {
  static const GaussLegendre& gl = gauss_legendre(kOwenOrder);
  const double half = 0.5 * a;
  const double h2 = 0.5 * h * h;
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double t = half * (gl.nodes[i] + 1.0);
    const double u = 1.0 + t * t;
    sum += gl.weights[i] * std::exp(-h2 * u) / u;
  }
  return half * sum / kTwoPi;
}

// Owen's T accepting a = +-inf, used where the decomposition divides by 0.
double owens_t_ext(double h, double a) {
  if (a == 0.0) return 0.0;
  if (a < 0.0) return -owens_t_ext(h, -a);
  h = std::abs(h);
  if (a == kInf) return 0.5 * std_norm_sf(h);
  if (a <= 1.0) return owens_t_small_a(h, a);
  // T(h, a) + T(ah, 1/a) = [Phi(h) Phi~(ah) + Phi(ah) Phi~(h)] / 2 for h >= 0.
  const double ah = a * h;
  const double head =
      0.5 * (std_norm_cdf(h) * std_norm_sf(ah) + std_norm_cdf(ah) * std_norm_sf(h));
  return head - owens_t_small_a(ah, 1.0 / a);
}

void validate_query(const BvnQuery& q) {
  if (std::isnan(q.x1) || std::isnan(q.x2) || std::isnan(q.rho))
    throw DomainError("bvn_cdf: NaN argument");
  if (std::abs(q.rho) > 1.0) throw DomainError("bvn_cdf: |rho| must not exceed 1");
}

double bvn_owen(double h, double k, double rho) {
  if (h == 0.0 && k == 0.0) return 0.25 + std::asin(rho) / kTwoPi;
  const double r = std::sqrt((1.0 - rho) * (1.0 + rho));
  const double ah = h == 0.0 ? std::copysign(kInf, k) : (k - rho * h) / (h * r);
  const double ak = k == 0.0 ? std::copysign(kInf, h) : (h - rho * k) / (k * r);
  // Opposite-sign quadrant correction.
  const double beta = (h * k < 0.0 || (h * k == 0.0 && h + k < 0.0)) ? 0.5 : 0.0;
  const double val = 0.5 * std_norm_cdf(h) + 0.5 * std_norm_cdf(k) -
                     owens_t_ext(h, ah) - owens_t_ext(k, ak) - beta;
  return std::clamp(val, 0.0, 1.0);
}

// Sheppard-type integral over theta in [0, asin(rho)].
double bvn_drezner1(double h, double k, double rho, int order) {
  const GaussLegendre& gl = gauss_legendre(order);
  const double upper = std::asin(rho);
  const double half = 0.5 * upper;
  const double ss = h * h + k * k;
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double th = half * (gl.nodes[i] + 1.0);
    const double c = std::cos(th);
    sum += gl.weights[i] * std::exp(-(ss - 2.0 * h * k * std::sin(th)) / (2.0 * c * c));
  }
  return std::clamp(std_norm_cdf(h) * std_norm_cdf(k) + half * sum / kTwoPi, 0.0, 1.0);
}

// Plackett's identity: integrate the bivariate density over r in [0, rho].
double bvn_drezner2(double h, double k, double rho, int order) {
  const GaussLegendre& gl = gauss_legendre(order);
  const double half = 0.5 * rho;
  const double ss = h * h + k * k;
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double r = half * (gl.nodes[i] + 1.0);
    const double one_m = (1.0 - r) * (1.0 + r);
    sum += gl.weights[i] * std::exp(-(ss - 2.0 * h * k * r) / (2.0 * one_m)) /
           std::sqrt(one_m);
  }
  return std::clamp(std_norm_cdf(h) * std_norm_cdf(k) + half * sum / kTwoPi, 0.0, 1.0);
}

// Cox's approximation for the upper orthant P(Y1 > a1, Y2 > a2), with Y1
// conditioned on exceeding a1 replaced by its mean. Evaluated at (-x1, -x2).
double bvn_cox1(double h, double k, double rho) {
  const double a1 = -h;
  const double a2 = -k;
  const double mills = std::exp(std_norm_log_pdf(a1) - std_norm_log_cdf(-a1));
  const double r = std::sqrt((1.0 - rho) * (1.0 + rho));
  return std::clamp(std_norm_cdf(-a1) * std_norm_cdf((rho * mills - a2) / r), 0.0, 1.0);
}

// Conditional Monte Carlo on the upper orthant at (-x1, -x2):
// Phi(-a1) E[Phi((rho Y1 - a2) / r) | Y1 > a1].
double bvn_cox2_mc(double h, double k, double rho, const BvnMethod& m) {
  const double a1 = -h;
  const double a2 = -k;
  const double r = std::sqrt((1.0 - rho) * (1.0 + rho));
  CounterRng rng(m.seed);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < m.mc_samples; ++i) {
    const double y1 = std_tnorm_draw(a1, kInf, rng);
    sum += std_norm_cdf((rho * y1 - a2) / r);
  }
  return std_norm_sf(a1) * sum / static_cast<double>(m.mc_samples);
}

// Separation-of-variables Monte Carlo: X1 drawn from its marginal below x1
// by inversion, then the conditional probability of X2 <= x2 averaged.
double bvn_mc_genz(double h, double k, double rho, const BvnMethod& m) {
  const double r = std::sqrt((1.0 - rho) * (1.0 + rho));
  const double ph = std_norm_cdf(h);
  if (ph == 0.0) return 0.0;
  CounterRng rng(m.seed);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < m.mc_samples; ++i) {
    const double x1 = std_norm_ppf(rng.uniform() * ph);
    sum += std_norm_cdf((k - rho * x1) / r);
  }
  return ph * sum / static_cast<double>(m.mc_samples);
}

}  // namespace

std::string_view to_string(BvnTag tag) {
  switch (tag) {
    case BvnTag::owen: return "owen";
    case BvnTag::cox1: return "cox1";
    case BvnTag::cox2_mc: return "cox2_mc";
    case BvnTag::drezner1: return "drezner1";
    case BvnTag::drezner2: return "drezner2";
    case BvnTag::mc_genz: return "mc_genz";
  }
  return "unknown";
}

BvnTag parse_bvn_tag(std::string_view name) {
  for (BvnTag t : {BvnTag::owen, BvnTag::cox1, BvnTag::cox2_mc, BvnTag::drezner1,
                   BvnTag::drezner2, BvnTag::mc_genz}) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError("unknown bvn method '" + std::string(name) + "'");
}

void validate(const BvnMethod& m) {
  if (m.is_monte_carlo() && m.mc_samples < 100)
    throw ConfigError("bvn: Monte Carlo methods need mc_samples >= 100");
  if (m.is_quadrature() && m.quad_points < 8)
    throw ConfigError("bvn: quadrature methods need quad_points >= 8");
}


double owens_t(double h, double a) {
  if (!std::isfinite(h) || !std::isfinite(a))
    throw DomainError("owens_t: arguments must be finite");
  return owens_t_ext(h, a);
}

double bvn_cdf(const BvnQuery& q, const BvnMethod& method) {
  validate_query(q);
  validate(method);
  const double h = q.x1, k = q.x2, rho = q.rho;
  if (h == -kInf || k == -kInf) return 0.0;
  if (h == kInf) return std_norm_cdf(k);
  if (k == kInf) return std_norm_cdf(h);
  if (rho > kRhoLimit) return std_norm_cdf(std::min(h, k));
  if (rho < -kRhoLimit) return std::max(0.0, std_norm_cdf(h) - std_norm_sf(k));
  switch (method.tag) {
    case BvnTag::owen: return bvn_owen(h, k, rho);
    case BvnTag::cox1: return bvn_cox1(h, k, rho);
    case BvnTag::cox2_mc: return bvn_cox2_mc(h, k, rho, method);
    case BvnTag::drezner1: return bvn_drezner1(h, k, rho, method.quad_points);
    case BvnTag::drezner2: return bvn_drezner2(h, k, rho, method.quad_points);
    case BvnTag::mc_genz: return bvn_mc_genz(h, k, rho, method);
  }
  throw ConfigError("bvn_cdf: unhandled method");
}

std::string BvnBenchReport::to_csv() const {
  std::ostringstream os;
  os << "method,n_evals,total_seconds,cum_abs_error\n";
  os << std::setprecision(12);
  for (const auto& r : rows) {
    os << r.method << ',' << r.n_evals << ',' << r.total_seconds << ','
       << r.cum_abs_error << '\n';
  }
  return os.str();
}

std::vector<BvnQuery> make_bvn_grid(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<BvnQuery> grid(n);
  for (auto& q : grid) {
    q.x1 = -3.0 + 6.0 * rng.uniform();
    q.x2 = -3.0 + 6.0 * rng.uniform();
    q.rho = -0.95 + 1.9 * rng.uniform();
  }
  return grid;
}

BvnBenchReport bvn_benchmark(const std::vector<BvnQuery>& grid,
                             const std::vector<BvnMethod>& methods,
                             std::uint64_t oracle_samples, std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("bvn_benchmark: empty grid");
  if (methods.empty()) throw ConfigError("bvn_benchmark: no methods");
  if (oracle_samples < 1000000)
    throw ConfigError("bvn_benchmark: oracle_samples must be at least 1e6");
  for (const auto& m : methods) validate(m);
  for (const auto& q : grid) validate_query(q);

  // One shared pool of independent standard normal pairs; each query's
  // oracle is the empirical cdf of the correlated transform of that pool.
  std::vector<double> z1(oracle_samples), z2(oracle_samples);
  {
    CounterRng rng(derive_seed(seed, 0));
    std::normal_distribution<double> norm;
    for (std::uint64_t i = 0; i < oracle_samples; ++i) {
      z1[i] = norm(rng);
      z2[i] = norm(rng);
    }
  }
  std::vector<double> oracle(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto& q = grid[j];
    const double r = std::sqrt(std::max(0.0, (1.0 - q.rho) * (1.0 + q.rho)));
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < oracle_samples; ++i) {
      hits += (z1[i] <= q.x1) & (q.rho * z1[i] + r * z2[i] <= q.x2);
    }
    oracle[j] = static_cast<double>(hits) / static_cast<double>(oracle_samples);
  }

  BvnBenchReport report;
  report.seed = seed;
  report.oracle_samples = oracle_samples;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    BvnMethod m = methods[mi];
    std::vector<double> est(grid.size());
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t j = 0; j < grid.size(); ++j) {
      m.seed = derive_seed(seed, 1 + j);
      est[j] = bvn_cdf(grid[j], m);
    }
    const auto t1 = std::chrono::steady_clock::now();
    BvnBenchRow row;
    row.method = std::string(to_string(m.tag));
    row.n_evals = grid.size();
    row.total_seconds = std::chrono::duration<double>(t1 - t0).count();
    for (std::size_t j = 0; j < grid.size(); ++j)
      row.cum_abs_error += std::abs(est[j] - oracle[j]);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace carve
