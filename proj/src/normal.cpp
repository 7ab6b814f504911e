#include "carve/normal.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "carve/errors.hpp"
#include "carve/quadrature.hpp"

namespace carve {

namespace {

constexpr double kInvSqrt2 = 0.707106781186547524400844362105;

// log Phi(z) for z <= -35 from the asymptotic Mills-ratio series. Terms fall
// below 1e-17 relative well before the series turns divergent.
constexpr double kAsymptoticCut = -35.0;

double mills_series(double z) {
  const double inv2 = 1.0 / (z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv2;
    sum += term;
  }
  return sum;
}

double log_cdf_lower_asymptotic(double z) {
  return std_norm_log_pdf(z) - std::log(-z) + std::log(mills_series(z));
}

// log Phi(lo) - log Phi(hi) for lo <= hi <= 0. Deep in the tail both logs
// are ~ -z^2/2, so the quadratic parts are differenced algebraically.
double log_cdf_gap(double lo, double hi) {
  if (lo == -std::numeric_limits<double>::infinity())
    return -std::numeric_limits<double>::infinity();
  if (hi < kAsymptoticCut) {
    return -0.5 * (lo - hi) * (lo + hi) - std::log(lo / hi) +
           std::log(mills_series(lo) / mills_series(hi));
  }
  return std_norm_log_cdf(lo) - std_norm_log_cdf(hi);
}

// erfc(x / sqrt 2) / 2 with the rounding error of the scaled argument
// folded back in through a first-order correction.
double half_erfc_scaled(double x) {
  constexpr double kInvSqrt2Lo = -4.8336466567264565e-17;
  constexpr double kTwoOverSqrtPi = 1.1283791670955125739;
  const double t = x * kInvSqrt2;
  if (!std::isfinite(t)) return 0.5 * std::erfc(t);
  const double e = std::fma(x, kInvSqrt2, -t) + x * kInvSqrt2Lo;
  return 0.5 * (std::erfc(t) - e * kTwoOverSqrtPi * std::exp(-t * t));
}

// Narrow intervals: integrate the density directly, relative to its value
// at the end nearest the origin.
double log_narrow_mass(double lo, double hi) {
  const GaussLegendre& gl = gauss_legendre(20);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  const double anchor = hi <= 0.0 ? hi : 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double x = mid + half * gl.nodes[i];
    sum += gl.weights[i] * std::exp(-0.5 * (x - anchor) * (x + anchor));
  }
  return -0.5 * anchor * anchor - kLogSqrt2Pi + std::log(half * sum);
}

}  // namespace

double std_norm_pdf(double z) {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double std_norm_log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double std_norm_cdf(double z) { return half_erfc_scaled(-z); }

double std_norm_sf(double z) { return half_erfc_scaled(z); }

double std_norm_log_cdf(double z) {
  if (std::isnan(z)) return z;
  if (z == -std::numeric_limits<double>::infinity()) return z;
  if (z < kAsymptoticCut) return log_cdf_lower_asymptotic(z);
  if (z > 5.0) return std::log1p(-std_norm_sf(z));
  return std::log(std_norm_cdf(z));
}

double std_norm_ppf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw DomainError("std_norm_ppf: probability outside [0, 1]");
  }
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double log_norm_interval_mass(double lo, double hi) {
  if (!(lo < hi)) return -std::numeric_limits<double>::infinity();
  if (lo > 0.0) return log_norm_interval_mass(-hi, -lo);
  if ((hi - lo) * std::max({1.0, -lo, hi}) <= 2.0) return log_narrow_mass(lo, hi);
  const double log_hi = std_norm_log_cdf(hi);
  if (hi <= 0.0) {
    const double d = log_cdf_gap(lo, hi);
    return log_hi + (d > -0.6931471805599453 ? std::log(-std::expm1(d))
                                             : std::log1p(-std::exp(d)));
  }
  // Straddles the origin: erf terms have opposite signs, no cancellation.
  return std::log(0.5 * (std::erf(hi * kInvSqrt2) - std::erf(lo * kInvSqrt2)));
}

void validate(const NormalParams& p) {
  if (!std::isfinite(p.mu)) throw DomainError("normal: mean must be finite");
  if (!(p.sigma2 > 0.0) || !std::isfinite(p.sigma2))
    throw DomainError("normal: variance must be positive and finite");
}

double norm_cdf(double x, const NormalParams& p) {
  validate(p);
  return std_norm_cdf((x - p.mu) / std::sqrt(p.sigma2));
}

double norm_pdf(double x, const NormalParams& p) {
  validate(p);
  const double s = std::sqrt(p.sigma2);
  return std_norm_pdf((x - p.mu) / s) / s;
}

}  // namespace carve
