#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "strainreal/jet.hpp"

namespace strainreal {

/// Coefficient field returning value and first/second partial derivatives.
using JetField = std::function<Jet(double x, double y)>;

/// Solution of dY/dt = speed(t, Y), Y(x) = y, sampled with a uniform step
/// from t = x to the requested end.
struct CharacteristicPath {
  double x_anchor = 0.0;
  double y_anchor = 0.0;
  std::vector<double> t;
  std::vector<double> y;
  /// dY/dy from the variational equation integrated alongside the path.
  std::vector<double> dy_dy;
  /// Set when the path left |Y| <= bound before reaching the end.
  bool truncated = false;
};

/// Classical RK4 on (Y, dY/dy); the number of steps is the smallest one
/// keeping the step at most `max_step`.
CharacteristicPath trace_characteristic(const JetField& speed, double x, double y, double t_end,
                                        double max_step,
                                        double bound = std::numeric_limits<double>::infinity());

/// exp(int_x^t d_y speed(s, Y(s)) ds) at each sample: the closed form of
/// dY/dy. The integral uses Simpson's rule per step with the midpoint of the
/// path from cubic Hermite interpolation.
std::vector<double> exponential_sensitivity(const CharacteristicPath& path, const JetField& speed);

/// dY/dx(t) = -speed(x, y) * exp(int_x^t d_y speed).
std::vector<double> anchor_x_sensitivity(const CharacteristicPath& path, const JetField& speed);

/// One RK4 step of dY/dt = speed(t, Y).
double rk4_step(const JetField& speed, double t, double y, double dt);

}  // namespace strainreal
