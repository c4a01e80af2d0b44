#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "strainreal/characteristics.hpp"
#include "strainreal/errors.hpp"
#include "strainreal/wave_global.hpp"

using namespace strainreal;
using std::numbers::pi;

namespace {

VelocityField u_eps(double eps) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "-x*y + %.17g/(2*pi^2)*sin(2*pi*y)", eps);
  VelocityField U = stream_to_velocity(parse_expression(buf));
  U.average = Mat2{1, 0, 0, -1};
  return U;
}

// a = 1 and b = 8 pi^2 amp cos(2 pi x) cos(2 pi y).
VelocityField tilted(double amp = 0.005) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "(x^2 - y^2)/2 + %.17g*sin(2*pi*x)*sin(2*pi*y)", amp);
  VelocityField U = stream_to_velocity(parse_expression(buf));
  U.average = Mat2{0, 1, 1, 0};
  return U;
}

double test_w(double t, double z) { return 0.3 * std::sin(t + 0.5) * std::cos(0.7 * z) + 0.1 * t * z; }

struct Derivs {
  double v, x, y, xx, xy, yy;
};

// Fourth-order differences of f at (x, y).
template <class F>
Derivs fd(F f, double x, double y, double d) {
  auto dx1 = [&](double yy) {
    return (-f(x + 2 * d, yy) + 8 * f(x + d, yy) - 8 * f(x - d, yy) + f(x - 2 * d, yy)) / (12 * d);
  };
  Derivs o;
  o.v = f(x, y);
  o.x = dx1(y);
  o.y = (-f(x, y + 2 * d) + 8 * f(x, y + d) - 8 * f(x, y - d) + f(x, y - 2 * d)) / (12 * d);
  o.xx = (-f(x + 2 * d, y) + 16 * f(x + d, y) - 30 * o.v + 16 * f(x - d, y) - f(x - 2 * d, y)) /
         (12 * d * d);
  o.yy = (-f(x, y + 2 * d) + 16 * f(x, y + d) - 30 * o.v + 16 * f(x, y - d) - f(x, y - 2 * d)) /
         (12 * d * d);
  o.xy = (-dx1(y + 2 * d) + 8 * dx1(y + d) - 8 * dx1(y - d) + dx1(y - 2 * d)) / (12 * d);
  return o;
}

}  // namespace

TEST_CASE("wave coefficients of the cosine perturbation") {
  const WaveCoefficients c = wave_coefficients(u_eps(0.05));
  CHECK(c.rotated);
  CHECK(c.flipped);
  CHECK(c.M.m12 == doctest::Approx(2.0));
  CHECK(c.M.m21 == doctest::Approx(2.0));
  CHECK(c.a_min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.a_max == doctest::Approx(2.0).epsilon(1e-12));
  for (int k = 0; k < 10; ++k) {
    const double x = 0.1 * k - 0.3, y = 0.07 * k;
    CHECK(c.alpha.eval(x, y) * c.beta.eval(x, y) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(c.b.eval(x, y) == doctest::Approx(-0.1 * std::sin(2 * pi * (x - y))).epsilon(1e-12));
  }
  const auto p = c.to_working(0.4, -0.2);
  CHECK(p[0] == doctest::Approx(0.1));
  CHECK(p[1] == doctest::Approx(0.3));
}

TEST_CASE("wave coefficient hypotheses") {
  VelocityField rot = stream_to_velocity(parse_expression("-(x^2 + y^2)/2"));
  rot.average = Mat2{0, 1, -1, 0};
  CHECK_THROWS_AS(wave_coefficients(rot), HypothesisError);

  VelocityField nonper = stream_to_velocity(parse_expression("(x^2 - y^2)/2 + x^3*y"));
  nonper.average = Mat2{0, 1, 1, 0};
  CHECK_THROWS_AS(wave_coefficients(nonper), HypothesisError);

  VelocityField big = stream_to_velocity(parse_expression("(x^2 - y^2)/2 - 0.5/(2*pi)*cos(2*pi*y)"));
  big.average = Mat2{0, 1, 1, 0};
  CHECK_THROWS_AS(wave_coefficients(big), HypothesisError);

  VelocityField none = stream_to_velocity(parse_expression("x*y"));
  CHECK_THROWS_AS(wave_coefficients(none), HypothesisError);
}

TEST_CASE("scaling the perturbation to zero leaves the linear field") {
  const VelocityField U = scale_perturbation(u_eps(0.3), 0.0);
  for (double x : {-0.7, 0.2, 1.3}) {
    CHECK(U.ux.eval(x, 0.4) == doctest::Approx(x));
    CHECK(U.uy.eval(x, 0.4) == doctest::Approx(-0.4));
  }
}

TEST_CASE("characteristic diffeomorphism") {
  const WaveCoefficients c = wave_coefficients(tilted());
  const CharacteristicDiffeo d(c, 1.5, 4.0, 1.0 / 64);
  const JetField alpha = [&](double x, double y) { return c.alpha.jet(x, y); };
  for (int k = 0; k < 12; ++k) {
    const double x = -1.0 + 0.17 * k, y = 0.9 - 0.15 * k;
    double xi, eta;
    REQUIRE(d.forward(x, y, xi, eta));
    CHECK(std::abs(d.R(x, xi) - y) <= 1e-8);
    CHECK(std::abs(d.S(x, eta) - y) <= 1e-8);
    double xb, yb;
    REQUIRE(d.inverse(0.5 * (xi - eta), 0.5 * (xi + eta), xb, yb));
    CHECK(std::abs(xb - x) <= 1e-8);
    CHECK(std::abs(yb - y) <= 1e-8);

    // Independent path integration from the anchor.
    const CharacteristicPath path = trace_characteristic(alpha, 0.0, xi, x, 1.0 / 4096);
    CHECK(std::abs(path.y.back() - y) <= 1e-8);
    const CharacteristicFrame f = d.frame(x, y, xi, eta);
    const double sens = exponential_sensitivity(path, alpha).back();
    CHECK(f.R_xi == doctest::Approx(sens).epsilon(1e-6));
    CHECK(f.jacobian() == doctest::Approx((f.beta - f.alpha) / (f.R_xi * f.S_eta)).epsilon(1e-12));
    CHECK(f.jacobian() > 0.0);

    auto xi_of = [&](double px, double py) {
      double a, b;
      d.forward(px, py, a, b);
      return a;
    };
    const Derivs g = fd(xi_of, x, y, 1e-2);
    CHECK(f.xi_x == doctest::Approx(g.x).epsilon(1e-6));
    CHECK(f.xi_y == doctest::Approx(g.y).epsilon(1e-6));
    CHECK(std::abs(f.xi_xx - g.xx) <= 1e-4);
    CHECK(std::abs(f.xi_xy - g.xy) <= 1e-4);
    CHECK(std::abs(f.xi_yy - g.yy) <= 1e-4);
  }
}

TEST_CASE("canonical system reproduces the u-equation where the window is one") {
  for (const VelocityField& U : {tilted(), u_eps(0.2)}) {
    const WaveCoefficients c = wave_coefficients(U);
    // Fine lattice: differencing the interpolant amplifies its error.
    const CharacteristicDiffeo d(c, 0.8, 1.6, 1.0 / 256);
    const CanonicalSystem sys(c, d, 2);
    const VelocityField& W = c.working;
    const Vec2Expr lap = laplacian(Vec2Expr{W.ux, W.uy});
    const Expr lap_curl = laplacian(curl(W));
    auto u_of = [&](double x, double y) {
      double xi, eta;
      d.forward(x, y, xi, eta);
      return test_w(0.5 * (xi - eta), 0.5 * (xi + eta));
    };
    for (int k = 0; k < 8; ++k) {
      const double x = -0.6 + 0.15 * k, y = 0.5 - 0.13 * k;
      double xi, eta;
      REQUIRE(d.forward(x, y, xi, eta));
      const CharacteristicFrame f = d.frame(x, y, xi, eta);
      const double t = f.t(), z = f.z();
      const CanonicalCoeffs cc = sys.at_frame(f);

      const Derivs w = fd(test_w, t, z, 1e-2);
      const double ew = (w.xx - w.yy) - (cc.b11 * w.x * w.x + 2 * cc.b12 * w.x * w.y + cc.b22 * w.y * w.y) -
                        (cc.v1 * w.x + cc.v2 * w.y) - cc.h;

      const Derivs u = fd(u_of, x, y, 1e-2);
      const double a = c.a.eval(x, y), b = c.b.eval(x, y);
      const double eu = a * u.xx + 2 * b * u.xy - a * u.yy + a * u.x * u.x + 2 * b * u.x * u.y -
                        a * u.y * u.y - (-lap.y.eval(x, y) * u.x + lap.x.eval(x, y) * u.y) +
                        0.5 * lap_curl.eval(x, y);
      const double P = (a * a + b * b) / (a * f.R_xi * f.S_eta);
      // Fourth-order differences at step 1e-2 on terms of size ~10.
      CHECK(std::abs(P * ew - eu) <= 1e-5 * (1.0 + std::abs(lap_curl.eval(x, y))));

      // Forcing by composition at the pulled-back point.
      CHECK(cc.h == doctest::Approx(-0.5 * lap_curl.eval(x, y) / P).epsilon(1e-9));
    }
  }
}

TEST_CASE("printed principal factor differs where b does not vanish") {
  const WaveCoefficients c = wave_coefficients(tilted(0.02));
  const CharacteristicDiffeo d(c, 1.5, 4.0, 1.0 / 64);
  const CanonicalSystem sys(c, d, 2);
  double xi, eta;
  REQUIRE(d.forward(0.05, 0.05, xi, eta));
  const CharacteristicFrame f = d.frame(0.05, 0.05, xi, eta);
  const double b = c.b.eval(0.05, 0.05), a = c.a.eval(0.05, 0.05);
  const double expected = (a * a + b * b) / (a * a + 2 * b * b);
  CHECK(sys.h_printed(f) == doctest::Approx(sys.at_frame(f).h * expected).epsilon(1e-12));
  CHECK(std::abs(expected - 1.0) > 0.1);
}

TEST_CASE("u-equation residual is the conjugated realization operator") {
  const VelocityField U = tilted();
  const Expr u = parse_expression("0.3*sin(x)*cos(2*y) + 0.1*x");
  const Expr lhs = wave_equation_residual(U, u);
  const Expr mu = Expr::exp(u);
  const Expr rhs = Expr::exp(-u) * curl_div(mu, strain_of(U));
  for (int k = 0; k < 10; ++k) {
    const double x = -0.9 + 0.2 * k, y = 0.3 * std::sin(k);
    CHECK(lhs.eval(x, y) == doctest::Approx(rhs.eval(x, y)).epsilon(1e-10));
  }
}

TEST_CASE("linear field gives mu identically one") {
  VelocityField U = stream_to_velocity(parse_expression("(x^2 - y^2)/2"));
  U.average = Mat2{0, 1, 1, 0};
  GlobalOptions o;
  o.h = 1.0 / 16;
  const GlobalRealization r = realize_global(U, o);
  CHECK(r.established());
  CHECK(r.mu.min() == 1.0);
  CHECK(r.mu.max() == 1.0);
  CHECK(r.residual.max_abs == 0.0);
}

TEST_CASE("global realization converges at second order") {
  std::vector<double> hs, res;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    GlobalOptions o;
    o.h = h;
    const GlobalRealization r = realize_global(u_eps(0.01), o);
    REQUIRE(r.established());
    CHECK(r.n == r.n_R);
    CHECK(r.jacobian_min > 0.0);
    hs.push_back(h);
    res.push_back(r.residual.max_abs);
  }
  CHECK(fitted_order(hs, res) >= 1.8);
}

TEST_CASE("realizations on nested disks agree") {
  GlobalOptions small, large;
  small.h = large.h = 1.0 / 32;
  large.radius = 2.0;
  small.n = large.n = PeriodicTruncation::smallest_n_for_disk(2.0);
  const GlobalRealization a = realize_global(u_eps(0.01), small);
  const GlobalRealization b = realize_global(u_eps(0.01), large);
  const int shift = static_cast<int>(std::lround((a.mu.grid.x0 - b.mu.grid.x0) * 32));
  double diff = 0.0;
  for (int j = 0; j < a.mu.grid.ny; ++j) {
    for (int i = 0; i < a.mu.grid.nx; ++i) {
      const double x = a.mu.grid.x(i), y = a.mu.grid.y(j);
      if (x * x + y * y > 1.0) continue;
      diff = std::max(diff, std::abs(a.mu(i, j) - b.mu(i + shift, j + shift)));
    }
  }
  CHECK(diff <= 1e-8);
}

TEST_CASE("periodized average of an exponential") {
  const Grid2D g(0.0, 0.0, 1.0, 1.0, 5, 5);
  const PeriodizedAverage p = periodized_average(parse_expression("exp(2*pi*x)"), 3, g);
  for (int i = 0; i < g.nx; ++i) {
    double s = 0.0;
    for (int q = -3; q <= 3; ++q) s += std::exp(2 * pi * (g.x(i) + q));
    CHECK(p.mu(i, 2) == doctest::Approx(s / 7.0).epsilon(1e-12));
  }
  REQUIRE(p.sup_by_k.size() == 4);
  for (int k = 1; k <= 3; ++k) {
    CHECK(p.sup_by_k[k] / p.sup_by_k[k - 1] >
          0.5 * std::exp(2 * pi) * (2.0 * k - 1) / (2.0 * k + 1));
  }
}
