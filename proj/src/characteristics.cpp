#include "strainreal/characteristics.hpp"

#include <cmath>
#include <stdexcept>

namespace strainreal {

double rk4_step(const JetField& speed, double t, double y, double dt) {
  const double k1 = speed(t, y).v;
  const double k2 = speed(t + 0.5 * dt, y + 0.5 * dt * k1).v;
  const double k3 = speed(t + 0.5 * dt, y + 0.5 * dt * k2).v;
  const double k4 = speed(t + dt, y + dt * k3).v;
  return y + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

CharacteristicPath trace_characteristic(const JetField& speed, double x, double y, double t_end,
                                        double max_step, double bound) {
  if (!(max_step > 0.0)) throw std::invalid_argument("characteristic step must be positive");
  CharacteristicPath path;
  path.x_anchor = x;
  path.y_anchor = y;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t_end - x) / max_step - 1e-9)));
  const double dt = (t_end - x) / steps;
  path.t.push_back(x);
  path.y.push_back(y);
  path.dy_dy.push_back(1.0);
  double Y = y, S = 1.0;
  for (int k = 0; k < steps; ++k) {
    const double t = x + k * dt;
    // Variational equation dS/dt = d_y speed(t, Y) S, stepped jointly.
    const Jet j1 = speed(t, Y);
    const double y1 = j1.v, s1 = j1.y * S;
    const Jet j2 = speed(t + 0.5 * dt, Y + 0.5 * dt * y1);
    const double y2 = j2.v, s2 = j2.y * (S + 0.5 * dt * s1);
    const Jet j3 = speed(t + 0.5 * dt, Y + 0.5 * dt * y2);
    const double y3 = j3.v, s3 = j3.y * (S + 0.5 * dt * s2);
    const Jet j4 = speed(t + dt, Y + dt * y3);
    const double y4 = j4.v, s4 = j4.y * (S + dt * s3);
    Y += dt * (y1 + 2.0 * y2 + 2.0 * y3 + y4) / 6.0;
    S += dt * (s1 + 2.0 * s2 + 2.0 * s3 + s4) / 6.0;
    path.t.push_back(k + 1 == steps ? t_end : x + (k + 1) * dt);
    path.y.push_back(Y);
    path.dy_dy.push_back(S);
    if (std::abs(Y) > bound) {
      path.truncated = true;
      break;
    }
  }
  return path;
}

std::vector<double> exponential_sensitivity(const CharacteristicPath& path, const JetField& speed) {
  std::vector<double> out(path.t.size(), 1.0);
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < path.t.size(); ++k) {
    const double t0 = path.t[k], t1 = path.t[k + 1], dt = t1 - t0;
    const Jet a0 = speed(t0, path.y[k]);
    const Jet a1 = speed(t1, path.y[k + 1]);
    const double ym = 0.5 * (path.y[k] + path.y[k + 1]) + dt * (a0.v - a1.v) / 8.0;
    const Jet am = speed(t0 + 0.5 * dt, ym);
    integral += dt * (a0.y + 4.0 * am.y + a1.y) / 6.0;
    out[k + 1] = std::exp(integral);
  }
  return out;
}

std::vector<double> anchor_x_sensitivity(const CharacteristicPath& path, const JetField& speed) {
  std::vector<double> out = exponential_sensitivity(path, speed);
  const double a = speed(path.x_anchor, path.y_anchor).v;
  for (double& v : out) v *= -a;
  return out;
}

}  // namespace strainreal
