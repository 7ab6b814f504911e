#pragma once

// Standard normal building blocks shared by every distribution module.

namespace carve {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

double std_norm_pdf(double z);
double std_norm_log_pdf(double z);
double std_norm_cdf(double z);
// Upper tail 1 - Phi(z), accurate for large positive z.
double std_norm_sf(double z);
// log Phi(z); finite for every finite z, -inf at -inf.
double std_norm_log_cdf(double z);
double std_norm_ppf(double p);

// log(Phi(hi) - Phi(lo)) for lo <= hi, evaluated on whichever side of the
// origin keeps both terms away from 1. Returns -inf for an empty interval.
double log_norm_interval_mass(double lo, double hi);

struct NormalParams {
  double mu = 0.0;
  double sigma2 = 1.0;
};

void validate(const NormalParams& p);
double norm_cdf(double x, const NormalParams& p);
double norm_pdf(double x, const NormalParams& p);

}  // namespace carve
