#pragma once

#include <vector>

namespace carve {

// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

}  // namespace carve
