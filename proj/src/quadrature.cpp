#include "carve/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "carve/errors.hpp"

namespace carve {

const GaussLegendre& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  if (order < 1) throw ConfigError("gauss_legendre: order must be positive");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  // Legendre P_n and P_{n-1} by the three-term recurrence.
  auto legendre = [order](double x) {
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= order; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{order == 1 ? x : p1, order == 1 ? 1.0 : p0};
  };
  GaussLegendre gl;
  gl.nodes.resize(order);
  gl.weights.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, pm] = legendre(x);
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pm] = legendre(x);
    dp = n * (x * pn - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return cache.emplace(order, std::move(gl)).first->second;
}

}  // namespace carve
