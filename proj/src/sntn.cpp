#include "carve/sntn.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "carve/errors.hpp"
#include "carve/normal.hpp"
#include "carve/rootfind.hpp"

namespace carve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRhoUnit = 1.0 - 1e-10;
constexpr double kRhoZero = 1e-14;
// Below this truncation mass the bivariate-cdf difference loses too many
// digits and the conditional integral is used instead.
const double kLogQuadratureMass = std::log(1e-5);

double log_mass_or_throw(double omega, double delta) {
  const double lm = log_norm_interval_mass(omega, delta);
  if (!std::isfinite(lm)) {
    std::ostringstream os;
    os << "sntn: truncation mass underflows on [" << omega << ", " << delta << "]";
    throw TruncationMassError(os.str());
  }
  return lm;
}

// P(W <= w) for W standard normal restricted to [omega, delta].
double std_tn_cdf(double w, double omega, double delta) {
  if (w <= omega) return 0.0;
  if (w >= delta) return 1.0;
  return std::exp(log_norm_interval_mass(omega, w) - log_mass_or_throw(omega, delta));
}

double bvn_or_limit(double m, double w, double rho, const BvnMethod& bvn) {
  if (w == -kInf) return 0.0;
  if (w == kInf) return std_norm_cdf(m);
  return bvn_cdf(BvnQuery{m, w, rho}, bvn);
}

// P(U <= m | W in [omega, delta]) written as the conditional integral
// int phi(w) Phi((m - rho w) / r) dw over the truncation interval, anchored
// at delta. Used when the interval carries little mass; delta is finite.
double conditional_integral(double m, double omega, double delta, double rho,
                            double log_mass) {
  const double r = std::sqrt((1.0 - rho) * (1.0 + rho));
  // Weight relative to phi(delta) is exp(delta s - s^2 / 2) at w = delta - s;
  // beyond s_max it is below exp(-50).
  const double s_max = delta + std::sqrt(delta * delta + 100.0);
  const double s_end = std::min(delta - omega, s_max);
  auto f = [&](double s) {
    return std::exp(delta * s - 0.5 * s * s) *
           std_norm_cdf((m - rho * (delta - s)) / r);
  };
  const double num = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, 0.0, s_end, 12, 1e-12);
  // int weight over [omega, delta] = mass / phi(delta).
  const double den = std::exp(log_mass - std_norm_log_pdf(delta));
  return std::clamp(num / den, 0.0, 1.0);
}

// P(U <= m | W in [omega, delta]) for |rho| strictly inside (0, 1).
double conditional_cdf(double m, double omega, double delta, double rho,
                       const BvnMethod& bvn) {
  if (omega == -kInf && delta == kInf) return std_norm_cdf(m);
  if (m == -kInf) return 0.0;
  if (m == kInf) return 1.0;
  // Orient the interval so it does not sit in the upper tail; (U, W) ->
  // (-U, -W) keeps rho.
  if (omega + delta > 0.0) {
    return 1.0 - conditional_cdf(-m, -delta, -omega, rho, bvn);
  }
  const double log_mass = log_mass_or_throw(omega, delta);
  if (log_mass < kLogQuadratureMass) {
    return conditional_integral(m, omega, delta, rho, log_mass);
  }
  const double num = bvn_or_limit(m, delta, rho, bvn) - bvn_or_limit(m, omega, rho, bvn);
  return std::clamp(num / std::exp(log_mass), 0.0, 1.0);
}

}  // namespace

void validate(const SntnInputs& in) {
  for (double v : {in.mu1, in.mu2, in.c1, in.c2}) {
    if (!std::isfinite(v)) throw DomainError("sntn: means and weights must be finite");
  }
  if (!(in.tau1_2 > 0.0) || !(in.tau2_2 > 0.0) || !std::isfinite(in.tau1_2) ||
      !std::isfinite(in.tau2_2))
    throw DomainError("sntn: variances must be positive and finite");
  if (std::isnan(in.a) || std::isnan(in.b) || !(in.a < in.b))
    throw DomainError("sntn: truncation requires a < b");
  if (in.c1 == 0.0 && in.c2 == 0.0) throw DomainError("sntn: c1 and c2 both zero");
}

SntnCanonical canonicalize(const SntnInputs& in) {
  validate(in);
  SntnCanonical c;
  c.theta1 = in.c1 * in.mu1 + in.c2 * in.mu2;
  c.sigma1_2 = in.c1 * in.c1 * in.tau1_2 + in.c2 * in.c2 * in.tau2_2;
  c.theta2 = in.mu2;
  c.sigma2_2 = in.tau2_2;
  c.pure_normal = in.c2 == 0.0;
  c.pure_truncated = in.c1 == 0.0;
  const double sigma1 = std::sqrt(c.sigma1_2);
  const double sigma2 = std::sqrt(c.sigma2_2);
  if (c.pure_truncated) {
    c.rho = std::copysign(1.0, in.c2);
  } else {
    c.rho = std::clamp(in.c2 * sigma2 / sigma1, -1.0, 1.0);
  }
  const double r = std::sqrt((1.0 - c.rho) * (1.0 + c.rho));
  c.gamma = 1.0 / r;
  c.lambda = c.rho * c.gamma;
  c.omega = (in.a - c.theta2) / sigma2;
  c.delta = (in.b - c.theta2) / sigma2;
  return c;
}

SntnInputs standard_inputs(const SntnCanonical& c) {
  const double sigma1 = std::sqrt(c.sigma1_2);
  const double sigma2 = std::sqrt(c.sigma2_2);
  SntnInputs in;
  in.c2 = c.rho * sigma1 / sigma2;
  in.c1 = 1.0;
  in.tau1_2 = c.sigma1_2 * (1.0 - c.rho) * (1.0 + c.rho);
  in.mu2 = c.theta2;
  in.tau2_2 = c.sigma2_2;
  in.mu1 = c.theta1 - in.c2 * c.theta2;
  in.a = c.theta2 + sigma2 * c.omega;
  in.b = c.theta2 + sigma2 * c.delta;
  return in;
}

SntnCanonical reflect(const SntnCanonical& c) {
  SntnCanonical r = c;
  r.theta1 = -c.theta1;
  r.theta2 = -c.theta2;
  r.omega = -c.delta;
  r.delta = -c.omega;
  return r;
}

double sntn_pdf(double z, const SntnCanonical& c) {
  if (std::isnan(z)) throw DomainError("sntn_pdf: NaN argument");
  const double sigma1 = std::sqrt(c.sigma1_2);
  const double m = (z - c.theta1) / sigma1;
  if (!std::isfinite(m)) return 0.0;
  if (std::abs(c.rho) <= kRhoZero) return std_norm_pdf(m) / sigma1;
  if (std::abs(c.rho) >= kRhoUnit) {
    const double w = c.rho > 0.0 ? m : -m;
    if (w < c.omega || w > c.delta) return 0.0;
    return std::exp(std_norm_log_pdf(w) - std::log(sigma1) -
                    log_mass_or_throw(c.omega, c.delta));
  }
  const double lo = c.gamma * c.omega - c.lambda * m;
  const double hi = c.gamma * c.delta - c.lambda * m;
  const double log_num = std_norm_log_pdf(m) + log_norm_interval_mass(lo, hi);
  return std::exp(log_num - std::log(sigma1) - log_mass_or_throw(c.omega, c.delta));
}

double sntn_cdf(double z, const SntnCanonical& c, const BvnMethod& bvn) {
  if (std::isnan(z)) throw DomainError("sntn_cdf: NaN argument");
  if (!(c.omega < c.delta)) throw DomainError("sntn_cdf: requires omega < delta");
  const double m = (z - c.theta1) / std::sqrt(c.sigma1_2);
  if (std::abs(c.rho) <= kRhoZero) return std_norm_cdf(m);
  if (c.rho >= kRhoUnit) return std_tn_cdf(m, c.omega, c.delta);
  if (c.rho <= -kRhoUnit) return 1.0 - std_tn_cdf(-m, c.omega, c.delta);
  return conditional_cdf(m, c.omega, c.delta, c.rho, bvn);
}

double sntn_sf(double z, const SntnCanonical& c, const BvnMethod& bvn) {
  return sntn_cdf(-z, reflect(c), bvn);
}

double sntn_mean(const SntnCanonical& c) {
  const double lm = log_mass_or_throw(c.omega, c.delta);
  const double up = std::isfinite(c.omega) ? std::exp(std_norm_log_pdf(c.omega) - lm) : 0.0;
  const double down = std::isfinite(c.delta) ? std::exp(std_norm_log_pdf(c.delta) - lm) : 0.0;
  return c.theta1 + c.rho * std::sqrt(c.sigma1_2) * (up - down);
}

double sntn_ppf(double p, const SntnCanonical& c, double tol) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("sntn_ppf: p must lie in (0, 1)");
  RootProblem rp;
  rp.objective = [&](double z) { return sntn_cdf(z, c); };
  rp.target = p;
  rp.seed = sntn_mean(c);
  rp.scale = 0.5 * std::sqrt(c.sigma1_2);
  rp.tol = tol;
  return solve_root(rp);
}

double sntn_pvalue(double z_obs, const SntnCanonical& c, Tail tail) {
  switch (tail) {
    case Tail::left: return sntn_cdf(z_obs, c);
    case Tail::right: return sntn_sf(z_obs, c);
    case Tail::two_sided:
      return std::min(1.0, 2.0 * std::min(sntn_cdf(z_obs, c), sntn_sf(z_obs, c)));
  }
  throw ConfigError("sntn_pvalue: unknown tail");
}

Interval sntn_ci(double z_obs, const SntnInputs& tmpl, double alpha, double tol) {
  if (!std::isfinite(z_obs)) throw DomainError("sntn_ci: observation must be finite");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("sntn_ci: alpha must lie in (0, 1)");
  if (std::abs(tmpl.c1 + tmpl.c2 - 1.0) > 1e-12)
    throw ConfigError("sntn_ci: requires c1 + c2 = 1");
  auto at = [&](double mu) {
    SntnInputs in = tmpl;
    in.mu1 = mu;
    in.mu2 = mu;
    return canonicalize(in);
  };
  const double sigma1 = std::sqrt(at(0.0).sigma1_2);
  auto solve = [&](double target) {
    RootProblem rp;
    rp.objective = [&](double mu) { return sntn_cdf(z_obs, at(mu)); };
    rp.target = target;
    rp.seed = z_obs;
    rp.scale = sigma1;
    rp.tol = tol;
    return solve_root(rp);
  };
  return Interval{solve(1.0 - 0.5 * alpha), solve(0.5 * alpha)};
}

std::vector<double> sntn_cdf_batch(std::span<const double> z,
                                   std::span<const SntnCanonical> c) {
  if (z.empty() || c.empty()) return {};
  if (z.size() != c.size() && z.size() != 1 && c.size() != 1)
    throw ConfigError("sntn_cdf_batch: shapes do not broadcast");
  const std::size_t n = std::max(z.size(), c.size());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = sntn_cdf(z[z.size() == 1 ? 0 : i], c[c.size() == 1 ? 0 : i]);
  }
  return out;
}

}  // namespace carve
