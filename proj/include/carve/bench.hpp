#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carve/bvn.hpp"
#include "carve/report.hpp"
#include "carve/rootfind.hpp"

namespace carve {

// Root problems for n_intervals two-sided truncated-normal intervals: for
// each random (sigma2, a, b) and draw x, F_mu(x) = 1 - alpha/2 and alpha/2.
std::vector<RootProblem> tnorm_ci_problems(std::size_t n_intervals, double alpha,
                                           std::uint64_t seed);

struct RootBenchRow {
  std::string method;
  std::size_t n_roots = 0;
  double total_seconds = 0.0;
  double cum_residual = 0.0;
  double max_residual = 0.0;
  std::size_t failures = 0;
  double mean_evaluations = 0.0;
};

struct RootBenchReport {
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::vector<RootBenchRow> rows;
};

// Secant hybrid (sequential and batched in parallel) against bisection.
RootBenchReport rootfind_benchmark(std::size_t n_intervals, double alpha, std::uint64_t seed);

Table to_table(const RootBenchReport& r);
Table to_table(const BvnBenchReport& r);

}  // namespace carve
