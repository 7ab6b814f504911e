#include "carve/stats.hpp"

#include <boost/math/distributions/beta.hpp>

#include "carve/errors.hpp"

namespace carve {

Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double level) {
  if (n == 0) throw ConfigError("clopper_pearson: no trials");
  if (k > n) throw DomainError("clopper_pearson: successes exceed trials");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("clopper_pearson: level must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  const auto kd = static_cast<double>(k), nd = static_cast<double>(n);
  Interval ci{0.0, 1.0};
  if (k > 0) ci.lo = boost::math::quantile(boost::math::beta_distribution<>(kd, nd - kd + 1), tail);
  if (k < n) ci.hi = boost::math::quantile(boost::math::beta_distribution<>(kd + 1, nd - kd), 1 - tail);
  return ci;
}

}  // namespace carve
