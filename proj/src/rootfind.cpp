#include "carve/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace carve {

namespace {

struct Bracket {
  double lo, glo, hi, ghi;
};

class Residual {
 public:
  Residual(const RootProblem& p, RootStats& stats) : p_(p), stats_(stats) {}

  double operator()(double x) {
    ++stats_.evaluations;
    const double g = p_.objective(x) - p_.target;
    if (std::isnan(g)) {
      std::ostringstream os;
      os << "solve_root: objective returned NaN at x=" << x;
      throw DomainError(os.str());
    }
    if (std::abs(g) < best_residual_) {
      best_residual_ = std::abs(g);
      best_x_ = x;
    }
    return g;
  }

  double best_x() const { return best_x_; }
  double best_residual() const { return best_residual_; }

 private:
  const RootProblem& p_;
  RootStats& stats_;
  double best_x_ = std::numeric_limits<double>::quiet_NaN();
  double best_residual_ = std::numeric_limits<double>::infinity();
};

void validate(const RootProblem& p) {
  if (!p.objective) throw ConfigError("solve_root: missing objective");
  if (!(p.tol > 0.0)) throw ConfigError("solve_root: tol must be positive");
  if (p.max_iter < 1) throw ConfigError("solve_root: max_iter must be >= 1");
  if (!std::isfinite(p.seed) || !std::isfinite(p.target))
    throw DomainError("solve_root: seed and target must be finite");
  if (!(p.scale > 0.0) || !std::isfinite(p.scale))
    throw ConfigError("solve_root: scale must be positive and finite");
}

bool straddles(double a, double b) {
  return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0);
}

// Grow the bracket geometrically towards the side where the residual
// changes sign. Direction is inferred from the endpoint values; a flat
// residual grows both ends.
Bracket expand_bracket(const RootProblem& p, Residual& g, RootStats& stats) {
  double width = 20.0 * p.scale;
  Bracket b{p.seed - 0.5 * width, 0.0, p.seed + 0.5 * width, 0.0};
  b.glo = g(b.lo);
  b.ghi = g(b.hi);
  for (int d = 0;; ++d) {
    if (straddles(b.glo, b.ghi)) return b;
    if (d == kMaxBracketDoublings) {
      std::ostringstream os;
      os << "solve_root: no sign change after " << kMaxBracketDoublings
         << " bracket doublings, last bracket [" << b.lo << ", " << b.hi
         << "], residuals (" << b.glo << ", " << b.ghi << ")";
      throw BracketError(os.str(), b.lo, b.hi);
    }
    ++stats.doublings;
    const bool increasing = b.ghi > b.glo;
    const bool decreasing = b.ghi < b.glo;
    const bool root_left = (increasing && b.glo > 0.0) || (decreasing && b.glo < 0.0);
    const bool root_right = (increasing && b.ghi < 0.0) || (decreasing && b.ghi > 0.0);
    if (root_left) {
      b.hi = b.lo;
      b.ghi = b.glo;
      b.lo -= width;
      b.glo = g(b.lo);
    } else if (root_right) {
      b.lo = b.hi;
      b.glo = b.ghi;
      b.hi += width;
      b.ghi = g(b.hi);
    } else {
      b.lo -= 0.5 * width;
      b.hi += 0.5 * width;
      b.glo = g(b.lo);
      b.ghi = g(b.hi);
    }
    width *= 2.0;
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi))
      throw BracketError("solve_root: bracket overflowed", b.lo, b.hi);
  }
}

[[noreturn]] void throw_convergence(const char* what, const Residual& g) {
  std::ostringstream os;
  os << what << " (best x=" << g.best_x() << ", residual=" << g.best_residual()
     << ")";
  throw ConvergenceError(os.str(), g.best_x(), g.best_residual());
}

bool collapsed(const Bracket& b) {
  const double mag = std::max({1.0, std::abs(b.lo), std::abs(b.hi)});
  return b.hi - b.lo <= 4.0 * std::numeric_limits<double>::epsilon() * mag;
}

void shrink(Bracket& b, double x, double gx) {
  if (straddles(b.glo, gx) && !(gx == 0.0 && b.glo == 0.0)) {
    b.hi = x;
    b.ghi = gx;
  } else {
    b.lo = x;
    b.glo = gx;
  }
}

}  // namespace

double solve_root(const RootProblem& p, RootStats* stats_out) {
  validate(p);
  RootStats stats;
  Residual g(p, stats);
  Bracket b = expand_bracket(p, g, stats);
  if (std::abs(b.glo) <= p.tol) return b.lo;
  if (std::abs(b.ghi) <= p.tol) return b.hi;

  // Last two iterates drive the secant; start from the bracket ends.
  double xa = b.lo, ga = b.glo, xb = b.hi, gb = b.ghi;
  double width_before = b.hi - b.lo;
  double width_prev = width_before;
  bool force_bisect = false;
  for (int it = 1; it <= p.max_iter; ++it) {
    stats.iterations = it;
    double x = 0.5 * (b.lo + b.hi);
    if (!force_bisect && gb != ga) {
      const double cand = xb - gb * (xb - xa) / (gb - ga);
      if (std::isfinite(cand) && cand > b.lo && cand < b.hi) x = cand;
    }
    if (x == 0.5 * (b.lo + b.hi)) ++stats.bisections;
    const double gx = g(x);
    if (std::abs(gx) <= p.tol) {
      if (stats_out) *stats_out = stats;
      return x;
    }
    shrink(b, x, gx);
    xa = xb;
    ga = gb;
    xb = x;
    gb = gx;
    const double width = b.hi - b.lo;
    // The secant must halve the bracket every two steps or yield to bisection.
    force_bisect = width > 0.5 * width_before;
    width_before = width_prev;
    width_prev = width;
    if (collapsed(b)) {
      if (stats_out) *stats_out = stats;
      throw_convergence("solve_root: bracket collapsed above tolerance", g);
    }
  }
  if (stats_out) *stats_out = stats;
  throw_convergence("solve_root: max_iter exceeded", g);
}

double solve_root_bisection(const RootProblem& p, RootStats* stats_out) {
  validate(p);
  RootStats stats;
  Residual g(p, stats);
  Bracket b = expand_bracket(p, g, stats);
  if (std::abs(b.glo) <= p.tol) return b.lo;
  if (std::abs(b.ghi) <= p.tol) return b.hi;
  const int budget = std::max(p.max_iter, 2000);
  for (int it = 1; it <= budget; ++it) {
    stats.iterations = it;
    ++stats.bisections;
    const double x = 0.5 * (b.lo + b.hi);
    const double gx = g(x);
    if (std::abs(gx) <= p.tol) {
      if (stats_out) *stats_out = stats;
      return x;
    }
    shrink(b, x, gx);
    if (collapsed(b)) break;
  }
  if (stats_out) *stats_out = stats;
  throw_convergence("solve_root_bisection: no convergence", g);
}

std::vector<RootOutcome> solve_batch(const std::vector<RootProblem>& problems,
                                     bool parallel) {
  std::vector<RootOutcome> out(problems.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i].x = solve_root(problems[i]);
      } catch (const Error& e) {
        out[i].x = std::numeric_limits<double>::quiet_NaN();
        out[i].error = e.code();
        out[i].message = e.what();
      }
    }
  };
  const std::size_t n = problems.size();
  const std::size_t workers =
      parallel ? std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n)
               : 1;
  if (workers <= 1) {
    run(0, n);
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(run, begin, end);
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace carve
