#include <cmath>
#include <limits>

#include "carve/errors.hpp"
#include "carve/normal.hpp"
#include "doctest.h"

using namespace carve;

namespace {
// Frozen from a 50-digit erf evaluation.
constexpr double kPhi1 = 0.841344746068542948585232545632;
constexpr double kPhiQ975 = 0.975000000026881562299178874994;
}  // namespace

TEST_CASE("norm_cdf reference values") {
  CHECK(norm_cdf(0.0, {0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-16));
  CHECK(std::abs(norm_cdf(1.959963985, {0.0, 1.0}) - 0.975) < 1e-9);
  CHECK(std::abs(norm_cdf(1.959963985, {0.0, 1.0}) - kPhiQ975) < 1e-15);
  CHECK(std::abs(norm_cdf(3.0, {1.0, 4.0}) - kPhi1) < 1e-15);
}

TEST_CASE("norm_cdf relative accuracy on |z| <= 8") {
  // Frozen 25-digit values.
  const double table[][2] = {
    {-8.0, 6.220960574271784123515995e-16},
    {-7.5, 3.190891672910896227767288e-14},
    {-7.0, 1.279812543885835004383624e-12},
    {-6.5, 4.016000583859117808346145e-11},
    {-6.0, 9.865876450376981407008641e-10},
    {-5.5, 1.898956246588771938385127e-8},
    {-5.0, 0.0000002866515718791939116737523},
    {-4.5, 0.000003397673124730060401687449},
    {-4.0, 0.00003167124183311992125377076},
    {-3.5, 0.0002326290790355250363499259},
    {-3.0, 0.001349898031630094526651815},
    {-2.5, 0.006209665325776135166978105},
    {-2.0, 0.02275013194817920720028264},
    {-1.5, 0.06680720126885806600449404},
    {-1.0, 0.1586552539314570514147675},
    {-0.5, 0.3085375387259868963622954},
    {0.0, 0.5},
    {0.5, 0.6914624612740131036377046},
    {1.0, 0.8413447460685429485852325},
    {1.5, 0.933192798731141933995506},
    {2.0, 0.9772498680518207927997174},
    {2.5, 0.9937903346742238648330219},
    {3.0, 0.9986501019683699054733482},
    {3.5, 0.9997673709209644749636501},
    {4.0, 0.9999683287581668800787462},
    {4.5, 0.9999966023268752699395983},
    {5.0, 0.9999997133484281208060883},
    {5.5, 0.9999999810104375341122806},
    {6.0, 0.9999999990134123549623019},
    {6.5, 0.9999999999598399941614088},
    {7.0, 0.9999999999987201874561142},
    {7.5, 0.9999999999999680910832709},
    {8.0, 0.9999999999999993779039426}};
  for (const auto& row : table) {
    CHECK(std::abs(std_norm_cdf(row[0]) - row[1]) <= 1e-15 * row[1]);
  }
}

TEST_CASE("invalid normal params") {
  CHECK_THROWS_AS(validate(NormalParams{0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(norm_cdf(0.0, {0.0, -1.0}), DomainError);
}

TEST_CASE("log cdf stays finite deep in the tail") {
  for (double z : {-10.0, -30.0, -34.9, -35.1, -100.0, -1e4}) {
    const double lc = std_norm_log_cdf(z);
    CHECK(std::isfinite(lc));
    // log Phi(z) ~ -z^2/2 - log(-z) - log sqrt(2 pi)
    const double lead = -0.5 * z * z - std::log(-z) - kLogSqrt2Pi;
    CHECK(std::abs(lc - lead) < 1.1 / (z * z));
  }
  // Continuity across the asymptotic switch.
  CHECK(std::abs(std_norm_log_cdf(-35.0 + 1e-9) - std_norm_log_cdf(-35.0 - 1e-9)) < 1e-6);
  CHECK(std_norm_log_cdf(-std::numeric_limits<double>::infinity()) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("ppf inverts cdf") {
  for (double p : {1e-300, 1e-12, 0.001, 0.1, 0.5, 0.9, 0.975, 1 - 1e-12}) {
    const double z = std_norm_ppf(p);
    CHECK(std_norm_cdf(z) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK(std_norm_ppf(0.0) == -std::numeric_limits<double>::infinity());
  CHECK(std_norm_ppf(1.0) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(std_norm_ppf(1.5), DomainError);
}

TEST_CASE("interval mass in the log domain") {
  // Straddling the origin.
  CHECK(std::exp(log_norm_interval_mass(-1.0, 1.0)) ==
        doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-15));
  // Far upper tail: Phi(41) - Phi(40) ~ sf(40).
  const double lm = log_norm_interval_mass(40.0, 41.0);
  CHECK(std::isfinite(lm));
  CHECK(lm == doctest::Approx(std_norm_log_cdf(-40.0)).epsilon(1e-12));
  // Narrow interval deep in the lower tail matches width * density.
  const double w = 1e-8;
  CHECK(std::exp(log_norm_interval_mass(-50.0, -50.0 + w) - std_norm_log_pdf(-50.0)) ==
        doctest::Approx(w).epsilon(1e-5));
  CHECK(log_norm_interval_mass(1.0, 1.0) == -std::numeric_limits<double>::infinity());
}
