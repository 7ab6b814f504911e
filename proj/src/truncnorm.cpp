#include "carve/truncnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carve/errors.hpp"
#include "carve/rng.hpp"
#include "carve/rootfind.hpp"

namespace carve {

namespace {

// Below this mass sampling is refused outright.
constexpr double kLogMinSamplingMass = -690.7755278982137;  // log(1e-300)
constexpr double kRejectionCut = 4.0;

struct Standardized {
  double sigma;
  double lo;
  double hi;
  double log_mass;
};

Standardized standardize(const TruncNormParams& p) {
  validate(p);
  Standardized s;
  s.sigma = std::sqrt(p.sigma2);
  s.lo = (p.a - p.mu) / s.sigma;
  s.hi = (p.b - p.mu) / s.sigma;
  s.log_mass = log_norm_interval_mass(s.lo, s.hi);
  if (!std::isfinite(s.log_mass)) {
    std::ostringstream os;
    os << "truncated normal: no representable mass on [" << p.a << ", " << p.b
       << "] for mu=" << p.mu << ", sigma2=" << p.sigma2;
    throw TruncationMassError(os.str());
  }
  return s;
}

// Exponential proposal with rate lo on [lo, hi], accepted with probability
// exp(-(z - lo)^2 / 2). Efficient for lo > 4.
double draw_exponential_rejection(double lo, double hi, CounterRng& rng) {
  const double width = hi - lo;
  const double span = std::isfinite(width) ? -std::expm1(-lo * width) : 1.0;
  for (;;) {
    const double e = -std::log1p(-rng.uniform() * span) / lo;
    if (rng.uniform() <= std::exp(-0.5 * e * e)) return std::min(lo + e, hi);
  }
}

}  // namespace

void validate(const TruncNormParams& p) {
  validate(NormalParams{p.mu, p.sigma2});
  if (std::isnan(p.a) || std::isnan(p.b))
    throw DomainError("truncated normal: NaN truncation bound");
  if (!(p.a < p.b))
    throw DomainError("truncated normal: lower bound must be below upper bound");
}

double tnorm_log_mass(const TruncNormParams& p) { return standardize(p).log_mass; }

double tnorm_cdf(double x, const TruncNormParams& p) {
  const Standardized s = standardize(p);
  if (x <= p.a) return 0.0;
  if (x >= p.b) return 1.0;
  const double z = (x - p.mu) / s.sigma;
  return std::clamp(std::exp(log_norm_interval_mass(s.lo, z) - s.log_mass), 0.0, 1.0);
}

double tnorm_sf(double x, const TruncNormParams& p) {
  const Standardized s = standardize(p);
  if (x <= p.a) return 1.0;
  if (x >= p.b) return 0.0;
  const double z = (x - p.mu) / s.sigma;
  return std::clamp(std::exp(log_norm_interval_mass(z, s.hi) - s.log_mass), 0.0, 1.0);
}

double tnorm_pdf(double x, const TruncNormParams& p) {
  const Standardized s = standardize(p);
  if (x < p.a || x > p.b) return 0.0;
  const double z = (x - p.mu) / s.sigma;
  return std::exp(std_norm_log_pdf(z) - std::log(s.sigma) - s.log_mass);
}

double tnorm_ppf(double prob, const TruncNormParams& p, double tol) {
  const Standardized s = standardize(p);
  if (!(prob > 0.0 && prob < 1.0))
    throw DomainError("tnorm_ppf: probability must lie in (0, 1)");
  // Start from the untruncated quantile pulled inside the support.
  double seed = p.mu + s.sigma * std_norm_ppf(prob);
  if (std::isfinite(p.a)) seed = std::max(seed, p.a);
  if (std::isfinite(p.b)) seed = std::min(seed, p.b);
  double scale = s.sigma;
  if (std::isfinite(p.a) && std::isfinite(p.b)) scale = std::min(scale, p.b - p.a);
  RootProblem rp;
  rp.objective = [&](double x) { return tnorm_cdf(x, p); };
  rp.target = prob;
  rp.seed = seed;
  rp.scale = 0.1 * scale;
  rp.tol = tol;
  return solve_root(rp);
}

double tnorm_mean(const TruncNormParams& p) {
  const Standardized s = standardize(p);
  const double up = std::isfinite(s.lo) ? std::exp(std_norm_log_pdf(s.lo) - s.log_mass) : 0.0;
  const double down = std::isfinite(s.hi) ? std::exp(std_norm_log_pdf(s.hi) - s.log_mass) : 0.0;
  return p.mu + s.sigma * (up - down);
}

Interval tnorm_ci(double x_obs, double sigma2, double a, double b, double alpha,
                  double tol) {
  validate(TruncNormParams{0.0, sigma2, a, b});
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("tnorm_ci: alpha must lie in (0, 1)");
  if (!(x_obs > a && x_obs < b) || !std::isfinite(x_obs))
    throw DomainError("tnorm_ci: observation must lie strictly inside (a, b)");
  const double sigma = std::sqrt(sigma2);
  auto solve = [&](double target) {
    RootProblem rp;
    rp.objective = [&](double mu) {
      return tnorm_cdf(x_obs, TruncNormParams{mu, sigma2, a, b});
    };
    rp.target = target;
    rp.seed = x_obs;
    rp.scale = sigma;
    rp.tol = tol;
    return solve_root(rp);
  };
  return Interval{solve(1.0 - 0.5 * alpha), solve(0.5 * alpha)};
}

double std_tnorm_draw(double lo, double hi, CounterRng& rng) {
  if (lo > kRejectionCut) return draw_exponential_rejection(lo, hi, rng);
  if (hi < -kRejectionCut) return -draw_exponential_rejection(-hi, -lo, rng);
  const double u = rng.uniform();
  double z;
  if (lo >= 0.0) {
    const double s_lo = std_norm_sf(lo);
    const double s_hi = std_norm_sf(hi);
    z = -std_norm_ppf(s_hi + u * (s_lo - s_hi));
  } else {
    const double c_lo = std_norm_cdf(lo);
    const double c_hi = std_norm_cdf(hi);
    z = std_norm_ppf(c_lo + u * (c_hi - c_lo));
  }
  return std::clamp(z, lo, hi);
}

std::vector<double> tnorm_rvs(const TruncNormParams& p, std::size_t n,
                              std::uint64_t seed) {
  if (n == 0) throw ConfigError("tnorm_rvs: n must be at least 1");
  const Standardized s = standardize(p);
  if (s.log_mass < kLogMinSamplingMass)
    throw TruncationMassError("tnorm_rvs: truncation mass below 1e-300");
  CounterRng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) {
    x = std::clamp(p.mu + s.sigma * std_tnorm_draw(s.lo, s.hi, rng), p.a, p.b);
  }
  return out;
}

}  // namespace carve
