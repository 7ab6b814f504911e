#pragma once

#include <cstdint>

#include "carve/truncnorm.hpp"

namespace carve {

// Exact binomial interval for k successes in n trials at the given
// two-sided confidence level.
Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double level = 0.95);

}  // namespace carve
