#include "carve/bench.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "carve/errors.hpp"
#include "carve/rng.hpp"
#include "carve/truncnorm.hpp"

namespace carve {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double residual(const RootProblem& p, double x) { return std::abs(p.objective(x) - p.target); }

}  // namespace

std::vector<RootProblem> tnorm_ci_problems(std::size_t n_intervals, double alpha,
                                           std::uint64_t seed) {
  if (n_intervals == 0) throw ConfigError("rootfind benchmark: need at least one interval");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("rootfind benchmark: alpha in (0, 1)");
  CounterRng rng(seed);
  std::vector<RootProblem> out;
  out.reserve(2 * n_intervals);
  for (std::size_t i = 0; i < n_intervals; ++i) {
    const double sigma2 = 0.25 + 2.0 * rng.uniform();
    const double sigma = std::sqrt(sigma2);
    // One-sided, two-sided and mirrored one-sided truncation in turn.
    const double lo = -3.0 + 4.0 * rng.uniform();
    const double width = 0.2 + 4.0 * rng.uniform();
    double a = sigma * lo, b = sigma * (lo + width);
    if (i % 3 == 0) b = std::numeric_limits<double>::infinity();
    if (i % 3 == 2) {
      b = -a;
      a = -std::numeric_limits<double>::infinity();
    }
    const double x = sigma * std_tnorm_draw(a / sigma, b / sigma, rng);
    for (double target : {1.0 - 0.5 * alpha, 0.5 * alpha}) {
      RootProblem p;
      p.objective = [=](double mu) { return tnorm_cdf(x, TruncNormParams{mu, sigma2, a, b}); };
      p.target = target;
      p.seed = x;
      p.scale = sigma;
      out.push_back(std::move(p));
    }
  }
  return out;
}

RootBenchReport rootfind_benchmark(std::size_t n_intervals, double alpha, std::uint64_t seed) {
  const auto problems = tnorm_ci_problems(n_intervals, alpha, seed);
  RootBenchReport rep;
  rep.seed = seed;
  rep.alpha = alpha;

  auto single = [&](const char* name, auto&& solve) {
    RootBenchRow row;
    row.method = name;
    row.n_roots = problems.size();
    std::size_t evals = 0;
    const auto t0 = Clock::now();
    std::vector<double> xs(problems.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < problems.size(); ++i) {
      RootStats st;
      try {
        xs[i] = solve(problems[i], &st);
      } catch (const Error&) {
        ++row.failures;
      }
      evals += static_cast<std::size_t>(st.evaluations);
    }
    row.total_seconds = seconds_since(t0);
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (std::isnan(xs[i])) continue;
      const double r = residual(problems[i], xs[i]);
      row.cum_residual += r;
      row.max_residual = std::max(row.max_residual, r);
    }
    row.mean_evaluations = static_cast<double>(evals) / problems.size();
    rep.rows.push_back(row);
  };
  single("hybrid", [](const RootProblem& p, RootStats* s) { return solve_root(p, s); });
  single("bisection",
         [](const RootProblem& p, RootStats* s) { return solve_root_bisection(p, s); });

  RootBenchRow row;
  row.method = "hybrid_batch";
  row.n_roots = problems.size();
  const auto t0 = Clock::now();
  const auto outcomes = solve_batch(problems, true);
  row.total_seconds = seconds_since(t0);
  for (std::size_t i = 0; i < problems.size(); ++i) {
    if (!outcomes[i].ok()) {
      ++row.failures;
      continue;
    }
    const double r = residual(problems[i], outcomes[i].x);
    row.cum_residual += r;
    row.max_residual = std::max(row.max_residual, r);
  }
  row.mean_evaluations = std::numeric_limits<double>::quiet_NaN();
  rep.rows.push_back(row);
  return rep;
}

Table to_table(const RootBenchReport& r) {
  Table t;
  t.columns = {"method", "n_roots", "total_seconds", "cum_residual", "max_residual",
               "failures", "mean_evaluations"};
  for (const auto& row : r.rows) {
    t.rows.push_back({row.method, static_cast<std::int64_t>(row.n_roots), row.total_seconds,
                      row.cum_residual, row.max_residual, static_cast<std::int64_t>(row.failures),
                      row.mean_evaluations});
  }
  return t;
}

Table to_table(const BvnBenchReport& r) {
  Table t;
  t.columns = {"method", "n_evals", "total_seconds", "cum_abs_error"};
  for (const auto& row : r.rows) {
    t.rows.push_back({row.method, static_cast<std::int64_t>(row.n_evals), row.total_seconds,
                      row.cum_abs_error});
  }
  return t;
}

}  // namespace carve
