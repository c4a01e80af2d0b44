#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "strainreal/fields.hpp"
#include "strainreal/grid.hpp"

namespace strainreal {

struct ResidualReport {
  double max_abs = 0.0;
  /// Discrete L2 norm, sqrt(sum r^2 hx hy) over the counted nodes.
  double l2 = 0.0;
  Grid2D grid;
  std::optional<double> convergence_order;
};

using PointMask = std::function<bool(double x, double y)>;

/// Norms of r over nodes at least `margin` away from the grid edge and, when
/// given, inside the mask.
ResidualReport summarize(const GridField& r, int margin = 0, const PointMask& inside = {});

/// Both evaluations of curl Div(mu e(U)).
struct RealizationResidual {
  ResidualReport symbolic;
  ResidualReport finite_difference;
};

/// Pointwise finite-difference curl Div(mu e) from nodal mu, e11, e12.
GridField curl_div_fd(const GridField& mu, const GridField& e11, const GridField& e12);

/// Rejects nonpositive mu with the offending location.
void require_positive(const GridField& mu);

RealizationResidual realization_residual(const Expr& mu, const VelocityField& U, const Grid2D& g,
                                         const PointMask& inside = {});
ResidualReport realization_residual(const GridField& mu, const VelocityField& U,
                                    const PointMask& inside = {});

/// Least-squares slope of log(err) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace strainreal
