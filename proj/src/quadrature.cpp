#include "strainreal/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace strainreal {

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[k] = x;
    rule.weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int nodes,
                 int panels_per_unit) {
  const GaussRule& rule = gauss_legendre(nodes);
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) * panels_per_unit - 1e-12)));
  const double w = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    double s = 0.0;
    for (int k = 0; k < nodes; ++k) s += rule.weights[k] * f(mid + 0.5 * w * rule.nodes[k]);
    total += 0.5 * w * s;
  }
  return total;
}

}  // namespace strainreal
