#pragma once

#include <random>

#include "carve/rng.hpp"
#include "carve/selection.hpp"

namespace carve::testing {

inline Matrix gaussian_matrix(int n, int p, std::uint64_t seed) {
  CounterRng rng(seed);
  std::normal_distribution<double> nd;
  Matrix X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = nd(rng);
  return X;
}

inline Vector gaussian_vector(int n, CounterRng& rng, std::normal_distribution<double>& nd) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

}  // namespace carve::testing
