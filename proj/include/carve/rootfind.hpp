#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "carve/errors.hpp"

namespace carve {

// Find x with |objective(x) - target| <= tol for a continuous monotone
// objective. `scale` sets the initial bracket half-width (10 * scale around
// `seed`).
struct RootProblem {
  std::function<double(double)> objective;
  double target = 0.0;
  double seed = 0.0;
  double scale = 1.0;
  double tol = 1e-8;
  int max_iter = 200;
};

struct RootStats {
  int iterations = 0;
  int evaluations = 0;
  int bisections = 0;
  int doublings = 0;
};

inline constexpr int kMaxBracketDoublings = 60;

// Safeguarded secant inside an expanding bracket, bisecting whenever the
// secant step leaves the bracket or stops shrinking it.
// Throws BracketError or ConvergenceError.
double solve_root(const RootProblem& p, RootStats* stats = nullptr);

// Plain bisection on the same bracket, kept as the benchmark baseline.
double solve_root_bisection(const RootProblem& p, RootStats* stats = nullptr);

struct RootOutcome {
  double x = 0.0;
  std::optional<ErrorCode> error;
  std::string message;
  bool ok() const { return !error.has_value(); }
};

// Element-wise solve_root; failures are recorded per element. The parallel
// path produces bitwise-identical output to the sequential one.
std::vector<RootOutcome> solve_batch(const std::vector<RootProblem>& problems,
                                     bool parallel);

}  // namespace carve
