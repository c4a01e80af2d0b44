#include "strainreal/laminate.hpp"

#include <cmath>
#include <numbers>

#include "strainreal/errors.hpp"
#include "strainreal/grid.hpp"

namespace strainreal {

namespace {

Vec2 rperp(const Vec2& v) { return {-v[1], v[0]}; }

Vec2 mat_vec(const Mat2& m, const Vec2& v) {
  return {m.m11 * v[0] + m.m12 * v[1], m.m21 * v[0] + m.m22 * v[1]};
}

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

Mat2 lincomb(double a, const Mat2& A, double b, const Mat2& B) {
  return {a * A.m11 + b * B.m11, a * A.m12 + b * B.m12, a * A.m21 + b * B.m21,
          a * A.m22 + b * B.m22};
}

bool equal(const Mat2& a, const Mat2& b) {
  return a.m11 == b.m11 && a.m12 == b.m12 && a.m21 == b.m21 && a.m22 == b.m22;
}

void require_phase(const Mat2& E, const char* name) {
  const double s = std::sqrt(E.frobenius2());
  if (E.m12 != E.m21) {
    throw HypothesisError(std::string("phase ") + name + " must be symmetric: " + describe(E));
  }
  if (std::abs(E.trace()) > 1e-12 * (1.0 + s)) {
    throw HypothesisError(std::string("phase ") + name + " must be trace-free: " + describe(E));
  }
}

// Cross component of (r E1 - E2) xi along R_perp xi, relative to its scale.
double cross(const Mat2& E1, const Mat2& E2, const Vec2& xi, double r, double& scale) {
  const Vec2 a = mat_vec(E1, xi), b = mat_vec(E2, xi), n = rperp(xi);
  scale = r * std::abs(dot(a, n)) + std::abs(dot(b, n));
  return r * dot(a, n) - dot(b, n);
}

}  // namespace

std::string describe(const Mat2& m) {
  // + 0.0 prints -0 as 0.
  return "[[" + format_double(m.m11 + 0.0) + ", " + format_double(m.m12 + 0.0) + "], [" +
         format_double(m.m21 + 0.0) + ", " + format_double(m.m22 + 0.0) + "]]";
}

Mat2 LaminateField::strain_at(double x, double y) const {
  const double s = x * xi[0] + y * xi[1];
  return s - std::floor(s) < chi_fraction ? E1 : E2;
}

Mat2 laminate_direction(const Vec2& xi) {
  const double c = xi[0], s = xi[1];
  const double off = 0.5 * (c * c - s * s);
  return {-c * s, off, off, c * s};
}

double normal_shear(const Mat2& E, const Vec2& xi) { return dot(mat_vec(E, rperp(xi)), xi); }

double strain_compatibility(const Mat2& E1, const Mat2& E2, const Vec2& xi) {
  require_phase(E1, "E1");
  require_phase(E2, "E2");
  if (std::abs(dot(xi, xi) - 1.0) > 1e-12) {
    throw HypothesisError("lamination direction xi must be a unit vector");
  }
  const Mat2 D = lincomb(1.0, E1, -1.0, E2);
  const Mat2 K = laminate_direction(xi);
  const double lambda = frobenius(D, K) / K.frobenius2();
  const Mat2 r = lincomb(1.0, D, -lambda, K);
  const double err = std::max({std::abs(r.m11), std::abs(r.m12), std::abs(r.m21), std::abs(r.m22)});
  if (err > 1e-12 * (1.0 + std::sqrt(D.frobenius2()))) {
    throw HypothesisError("incompatible jump: E1 - E2 = " + describe(D) +
                          " is not a multiple of xi (.) R_perp xi = " + describe(K));
  }
  return lambda;
}

LaminateField make_laminate(const Mat2& E1, const Mat2& E2, const Vec2& xi) {
  LaminateField f;
  f.E1 = E1;
  f.E2 = E2;
  f.xi = xi;
  f.lambda = strain_compatibility(E1, E2, xi);
  return f;
}

bool is_realizable(const Mat2& E1, const Mat2& E2) {
  if (equal(E1, E2)) return true;
  const double p = frobenius(E1, E2), n1 = E1.frobenius2(), n2 = E2.frobenius2();
  // Denominator is positive since E1 != E2; cross-multiplied to stay exact.
  return p * (n1 + n2) > n1 * n2 + p * p;
}

bool sign_test(const Mat2& E1, const Mat2& E2, const Vec2& xi) {
  return equal(E1, E2) || normal_shear(E1, xi) * normal_shear(E2, xi) > 0.0;
}

LaminateRealization realize_laminate(const Mat2& E1, const Mat2& E2, const Vec2& xi) {
  strain_compatibility(E1, E2, xi);
  LaminateRealization r;
  if (equal(E1, E2)) return r;
  if (!is_realizable(E1, E2)) {
    const double p = frobenius(E1, E2), n1 = E1.frobenius2(), n2 = E2.frobenius2();
    throw HypothesisError("laminate not realizable: E1:E2 = " + format_double(p) +
                          " does not exceed (|E1|^2 |E2|^2 + (E1:E2)^2)/(|E1|^2 + |E2|^2) = " +
                          format_double((n1 * n2 + p * p) / (n1 + n2)));
  }
  const double s1 = normal_shear(E1, xi), s2 = normal_shear(E2, xi);
  r.mu_ratio = s2 / s1;
  r.mu1 = std::sqrt(r.mu_ratio);
  r.mu2 = 1.0 / r.mu1;
  const Vec2 t = mat_vec(lincomb(r.mu1, E1, -r.mu2, E2), xi);
  r.pressure_jump = dot(t, xi);
  r.cross_residual = dot(t, rperp(xi));
  return r;
}

bool brute_force_realizable(const Mat2& E1, const Mat2& E2, const Vec2& xi, int ratio_grid) {
  if (equal(E1, E2)) return true;
  const double l0 = std::log(1e-6), l1 = std::log(1e6);
  double scale;
  double r_prev = std::exp(l0);
  double c_prev = cross(E1, E2, xi, r_prev, scale);
  if (std::abs(c_prev) <= 1e-9 * scale && scale > 0.0) return true;
  for (int k = 1; k < ratio_grid; ++k) {
    const double r = std::exp(l0 + (l1 - l0) * k / (ratio_grid - 1));
    const double c = cross(E1, E2, xi, r, scale);
    if (std::abs(c) <= 1e-9 * scale && scale > 0.0) return true;
    if ((c < 0.0) != (c_prev < 0.0)) {
      double lo = r_prev, hi = r, clo = c_prev;
      for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double cm = cross(E1, E2, xi, mid, scale);
        if (std::abs(cm) <= 1e-9 * scale) return scale > 0.0;
        if ((cm < 0.0) == (clo < 0.0)) {
          lo = mid;
          clo = cm;
        } else {
          hi = mid;
        }
      }
      return false;
    }
    r_prev = r;
    c_prev = c;
  }
  return false;
}

LaminateField random_compatible_pair(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double th = angle(rng);
  const Vec2 xi{std::cos(th), std::sin(th)};
  const double a = u(rng), b = u(rng), lambda = u(rng);
  const Mat2 E2{a, b, b, -a};
  const Mat2 E1 = lincomb(1.0, E2, lambda, laminate_direction(xi));
  LaminateField f;
  f.E1 = E1;
  f.E2 = E2;
  f.xi = xi;
  f.lambda = lambda;
  return f;
}

}  // namespace strainreal
