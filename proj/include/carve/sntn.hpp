#pragma once

#include <span>
#include <vector>

#include "carve/bvn.hpp"
#include "carve/truncnorm.hpp"

namespace carve {

// Z = c1 X1 + c2 X2 with X1 ~ N(mu1, tau1_2) and X2 ~ TN(mu2, tau2_2, a, b)
// independent: the sum of a normal and a truncated normal (SNTN).
struct SntnInputs {
  double mu1 = 0.0;
  double tau1_2 = 1.0;
  double mu2 = 0.0;
  double tau2_2 = 1.0;
  double a = -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  double c1 = 1.0;
  double c2 = 1.0;
};

// Location/scale form. With U = (Z - theta1) / sigma1 and W the standardized
// truncated component, (U, W) is standard bivariate normal with correlation
// rho and W restricted to [omega, delta].
struct SntnCanonical {
  double theta1 = 0.0;
  double sigma1_2 = 1.0;
  double theta2 = 0.0;
  double sigma2_2 = 1.0;
  double rho = 0.0;
  double lambda = 0.0;  // rho / sqrt(1 - rho^2)
  double gamma = 1.0;   // 1 / sqrt(1 - rho^2)
  double omega = -std::numeric_limits<double>::infinity();
  double delta = std::numeric_limits<double>::infinity();
  // c2 == 0: Z is normal. c1 == 0: Z is a scaled truncated normal.
  bool pure_normal = false;
  bool pure_truncated = false;
};

void validate(const SntnInputs& in);
SntnCanonical canonicalize(const SntnInputs& in);
// Inputs with c1 = 1 that canonicalize back to `c`.
SntnInputs standard_inputs(const SntnCanonical& c);
// Distribution of -Z.
SntnCanonical reflect(const SntnCanonical& c);

double sntn_pdf(double z, const SntnCanonical& c);
double sntn_cdf(double z, const SntnCanonical& c, const BvnMethod& bvn = {});
// 1 - F(z), evaluated on the reflected distribution.
double sntn_sf(double z, const SntnCanonical& c, const BvnMethod& bvn = {});
double sntn_ppf(double p, const SntnCanonical& c, double tol = 1e-8);
double sntn_mean(const SntnCanonical& c);

enum class Tail { left, right, two_sided };
double sntn_pvalue(double z_obs, const SntnCanonical& c, Tail tail);

// Equal-tailed interval for the common mean mu1 = mu2 = mu of `tmpl`
// (whose own mu1, mu2 are ignored). Requires c1 + c2 = 1.
Interval sntn_ci(double z_obs, const SntnInputs& tmpl, double alpha,
                 double tol = 1e-8);

// Element-wise evaluation; a length-1 argument broadcasts.
std::vector<double> sntn_cdf_batch(std::span<const double> z,
                                   std::span<const SntnCanonical> c);

}  // namespace carve
