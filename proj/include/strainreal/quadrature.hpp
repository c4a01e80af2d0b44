#pragma once

#include <functional>
#include <vector>

namespace strainreal {

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton on the Legendre recurrence).
const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre with `nodes` points per panel and panels of width
/// at most 1/panels_per_unit.
double integrate(const std::function<double(double)>& f, double a, double b, int nodes = 16,
                 int panels_per_unit = 1);

}  // namespace strainreal
