#pragma once

#include <array>
#include <optional>

#include "strainreal/expr.hpp"

namespace strainreal {

/// Plain 2x2 matrix, row-major.
struct Mat2 {
  double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;

  double trace() const { return m11 + m22; }
  double frobenius2() const { return m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22; }
};

inline double frobenius(const Mat2& a, const Mat2& b) {
  return a.m11 * b.m11 + a.m12 * b.m12 + a.m21 * b.m21 + a.m22 * b.m22;
}

struct Vec2Expr {
  Expr x, y;
};

/// Symbolic 2x2 matrix field.
struct Mat2Expr {
  Expr xx, xy, yx, yy;
};

/// Divergence-free velocity field, optionally with the affine part M of a
/// periodic perturbation U(X) = MX + periodic.
struct VelocityField {
  Expr ux, uy;
  std::optional<Mat2> average;
  bool periodic = false;
};

/// Symmetric trace-free strain [[e11, e12], [e12, -e11]].
struct StrainField {
  Expr e11, e12;

  Mat2Expr matrix() const { return {e11, e12, e12, -e11}; }
  Mat2 at(double x, double y) const {
    const double a = e11.eval(x, y), b = e12.eval(x, y);
    return {a, b, b, -a};
  }
};

/// U = R_perp grad u = (-u_y, u_x).
VelocityField stream_to_velocity(const Expr& u);
/// e11 = d_x Ux, e12 = (d_x Uy + d_y Ux)/2.
StrainField strain_of(const VelocityField& U);

Vec2Expr gradient(const Expr& f);
/// d_x Uy - d_y Ux.
Expr curl(const Vec2Expr& U);
Expr curl(const VelocityField& U);
Expr divergence(const VelocityField& U);
/// (d_x Sxx + d_y Syx, d_x Sxy + d_y Syy).
Vec2Expr div(const Mat2Expr& S);
Expr laplacian(const Expr& f);
Vec2Expr laplacian(const Vec2Expr& U);

/// curl Div(mu e(U)) expanded as (d_xx - d_yy)(mu e12) - 2 d_xy(mu e11).
Expr curl_div(const Expr& mu, const StrainField& e);

}  // namespace strainreal
