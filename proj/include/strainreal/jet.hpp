#pragma once

#include <cmath>

namespace strainreal {

/// Second-order forward-mode jet in two variables: value, gradient and
/// Hessian of a scalar function of (x, y) propagated through arithmetic.
struct Jet {
  double v = 0.0;
  double x = 0.0;
  double y = 0.0;
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static constexpr Jet constant(double c) { return {c, 0, 0, 0, 0, 0}; }
  static constexpr Jet var_x(double x0) { return {x0, 1, 0, 0, 0, 0}; }
  static constexpr Jet var_y(double y0) { return {y0, 0, 1, 0, 0, 0}; }
};

/// Applies a scalar function with value f0, first derivative f1 and second
/// derivative f2 at g.v.
inline Jet chain(const Jet& g, double f0, double f1, double f2) {
  return {f0,
          f1 * g.x,
          f1 * g.y,
          f2 * g.x * g.x + f1 * g.xx,
          f2 * g.x * g.y + f1 * g.xy,
          f2 * g.y * g.y + f1 * g.yy};
}

inline Jet operator+(const Jet& a, const Jet& b) {
  return {a.v + b.v, a.x + b.x, a.y + b.y, a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
}

inline Jet operator-(const Jet& a, const Jet& b) {
  return {a.v - b.v, a.x - b.x, a.y - b.y, a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
}

inline Jet operator-(const Jet& a) { return {-a.v, -a.x, -a.y, -a.xx, -a.xy, -a.yy}; }

inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v,
          a.x * b.v + a.v * b.x,
          a.y * b.v + a.v * b.y,
          a.xx * b.v + 2.0 * a.x * b.x + a.v * b.xx,
          a.xy * b.v + a.x * b.y + a.y * b.x + a.v * b.xy,
          a.yy * b.v + 2.0 * a.y * b.y + a.v * b.yy};
}

inline Jet operator*(double c, const Jet& a) {
  return {c * a.v, c * a.x, c * a.y, c * a.xx, c * a.xy, c * a.yy};
}

inline Jet reciprocal(const Jet& a) {
  const double r = 1.0 / a.v;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

inline Jet log(const Jet& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet ipow(const Jet& a, int n) {
  if (n == 0) return Jet::constant(1.0);
  if (n == 1) return a;
  const double p2 = n * (n - 1) * std::pow(a.v, n - 2);
  const double p1 = n * std::pow(a.v, n - 1);
  return chain(a, std::pow(a.v, n), p1, p2);
}

inline double ipow(double a, int n) { return std::pow(a, n); }

}  // namespace strainreal
