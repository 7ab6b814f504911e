#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "carve/quadrature.hpp"

namespace carve {

// P(X1 <= x1, X2 <= x2) for a standard bivariate normal with correlation rho.
// Coordinates may be infinite.
struct BvnQuery {
  double x1 = 0.0;
  double x2 = 0.0;
  double rho = 0.0;
};

enum class BvnTag { owen, cox1, cox2_mc, drezner1, drezner2, mc_genz };

struct BvnMethod {
  BvnTag tag = BvnTag::owen;
  std::uint64_t mc_samples = 10000;  // cox2_mc, mc_genz
  int quad_points = 20;              // drezner1, drezner2
  std::uint64_t seed = 0;            // Monte Carlo stream key

  bool is_monte_carlo() const {
    return tag == BvnTag::cox2_mc || tag == BvnTag::mc_genz;
  }
  bool is_quadrature() const {
    return tag == BvnTag::drezner1 || tag == BvnTag::drezner2;
  }
};

std::string_view to_string(BvnTag tag);
BvnTag parse_bvn_tag(std::string_view name);
void validate(const BvnMethod& m);

// Owen's T function (1/2pi) int_0^a exp(-h^2 (1 + t^2) / 2) / (1 + t^2) dt.
double owens_t(double h, double a);

double bvn_cdf(const BvnQuery& q, const BvnMethod& method = {});

struct BvnBenchRow {
  std::string method;
  std::size_t n_evals = 0;
  double total_seconds = 0.0;
  double cum_abs_error = 0.0;
};

struct BvnBenchReport {
  std::uint64_t seed = 0;
  std::uint64_t oracle_samples = 0;
  std::vector<BvnBenchRow> rows;

  std::string to_csv() const;
};

// Random queries with coordinates in [-3, 3] and |rho| <= 0.95.
std::vector<BvnQuery> make_bvn_grid(std::size_t n, std::uint64_t seed);

// Per method: wall time over the grid and sum of |estimate - oracle|, where
// the oracle is the empirical cdf of `oracle_samples` seeded draws.
BvnBenchReport bvn_benchmark(const std::vector<BvnQuery>& grid,
                             const std::vector<BvnMethod>& methods,
                             std::uint64_t oracle_samples, std::uint64_t seed);

}  // namespace carve
