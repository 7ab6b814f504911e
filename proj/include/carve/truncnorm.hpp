#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "carve/normal.hpp"

namespace carve {

// N(mu, sigma2) restricted to [a, b]; either bound may be infinite.
struct TruncNormParams {
  double mu = 0.0;
  double sigma2 = 1.0;
  double a = -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
};

void validate(const TruncNormParams& p);

// log of the probability mass N(mu, sigma2) places on [a, b].
double tnorm_log_mass(const TruncNormParams& p);

double tnorm_cdf(double x, const TruncNormParams& p);
// 1 - tnorm_cdf, evaluated without cancellation when the cdf is near 1.
double tnorm_sf(double x, const TruncNormParams& p);
double tnorm_pdf(double x, const TruncNormParams& p);
double tnorm_ppf(double prob, const TruncNormParams& p, double tol = 1e-12);
// E[X] for X ~ TN(mu, sigma2, a, b).
double tnorm_mean(const TruncNormParams& p);

struct Interval {
  double lo;
  double hi;
};

// Equal-tailed confidence interval for mu given one draw x_obs from
// TN(mu, sigma2, a, b): lo solves F_mu(x_obs) = 1 - alpha/2 and hi solves
// F_mu(x_obs) = alpha/2. Residuals in F are at most `tol`.
Interval tnorm_ci(double x_obs, double sigma2, double a, double b, double alpha,
                  double tol = 1e-8);

// n i.i.d. draws; inverse-cdf sampling for moderate truncation and
// exponential-proposal rejection when a standardized bound lies beyond 4.
std::vector<double> tnorm_rvs(const TruncNormParams& p, std::size_t n,
                              std::uint64_t seed);

class CounterRng;
// Single standardized draw from N(0, 1) restricted to [lo, hi].
double std_tnorm_draw(double lo, double hi, CounterRng& rng);

}  // namespace carve
