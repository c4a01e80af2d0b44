#include <cmath>
#include <random>

#include "doctest.h"
#include "strainreal/errors.hpp"
#include "strainreal/local_realizer.hpp"

using namespace strainreal;

TEST_CASE("orientation normalization") {
  const NormalizedStream id = normalize_orientation(parse_expression("(x^2 - y^2)/2"), 0, 0);
  CHECK_FALSE(id.record.rotated);
  CHECK_FALSE(id.record.flipped);
  const NormalizedStream flip = normalize_orientation(parse_expression("-(x^2 - y^2)/2"), 0, 0);
  CHECK(flip.record.flipped);
  CHECK_FALSE(flip.record.rotated);
  const NormalizedStream rot = normalize_orientation(parse_expression("x*y"), 0, 0);
  CHECK(rot.record.rotated);
  const Jet j = rot.u.jet(0, 0);
  CHECK(j.xx - j.yy > 0);
  CHECK_THROWS_AS(normalize_orientation(parse_expression("x + y^3"), 0, 0), HypothesisError);

  // Round trip of the coordinate change.
  OrientationRecord rec{0.3, -0.2, true, false};
  double xw, yw, x, y;
  rec.to_working(0.7, 0.1, xw, yw);
  rec.to_original(xw, yw, x, y);
  CHECK(x == doctest::Approx(0.7));
  CHECK(y == doctest::Approx(0.1));
}

TEST_CASE("local coefficients") {
  const LocalCoefficients lc = local_coefficients(parse_expression("(x^2 - y^2)/2"), 1.0);
  CHECK(lc.a.is_zero());
  CHECK(lc.alpha.eval(0.3, 0.2) == doctest::Approx(-1.0));
  CHECK(lc.beta.eval(0.3, 0.2) == doctest::Approx(1.0));
  CHECK(lc.gamma.eval(0.3, 0.2) == doctest::Approx(0.0));
  CHECK(lc.c == doctest::Approx(2.2));

  const LocalCoefficients k = local_coefficients(parse_expression("(x^2 - y^2)/2 + 0.7*x*y"), 1.0);
  CHECK(k.alpha.eval(0.1, 0.4) == doctest::Approx(0.7 - std::sqrt(1.49)));
  CHECK(k.beta.eval(0.1, 0.4) == doctest::Approx(0.7 + std::sqrt(1.49)));
  CHECK(std::abs(k.gamma.eval(0.1, 0.4)) < 1e-14);

  const LocalCoefficients p = local_coefficients(parse_expression("(x^2 - y^2)/2 + 0.1*x^3"), 0.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-0.35, 0.35);
  for (int n = 0; n < 100; ++n) {
    const double x = d(rng), y = d(rng);
    CHECK(std::abs(p.alpha.eval(x, y) * p.beta.eval(x, y) + 1.0) <= 1e-12);
    CHECK(p.beta.eval(x, y) - p.alpha.eval(x, y) >= 2.0 - 1e-12);
    CHECK(std::abs(p.alpha_ext(x, y).v) + std::abs(p.beta_ext(x, y).v) <= p.c);
  }
  CHECK_THROWS_AS(local_coefficients(parse_expression("x^2 - y^2 + 2*x^3"), 1.0), HypothesisError);
}

TEST_CASE("hyperbolic Cauchy problem: constant coefficients") {
  const LocalCoefficients lc = local_coefficients(parse_expression("(x^2 - y^2)/2"), 1.0);
  HyperbolicOptions opt;
  opt.nx = 129;
  opt.x_end = 0.25;
  const HyperbolicSolution s = solve_hyperbolic_cauchy(lc, Expr(0.0), Expr::y(), opt);
  const Grid2D& g = s.v.grid;
  for (int i = 0; i < g.nx; ++i) {
    for (int j = s.row_lo[i]; j <= s.row_hi[i]; ++j) {
      CHECK(s.v(i, j) == doctest::Approx(g.x(i) * g.y(j)).epsilon(1e-12).scale(1.0));
      CHECK(s.w(i, j) == doctest::Approx(g.y(j) - g.x(i)).epsilon(1e-12).scale(1.0));
    }
  }
  const HyperbolicSolution z = solve_hyperbolic_cauchy(lc, Expr(0.0), Expr(0.0), opt);
  CHECK(z.v.max_abs() == 0.0);
  CHECK(z.w.max_abs() == 0.0);
}

TEST_CASE("hyperbolic Cauchy problem: data-line identities") {
  const Expr u = parse_expression("(x^2 - y^2)/2 + 0.05*sin(x)*sin(y)");
  const LocalCoefficients lc = local_coefficients(u, 1.0);
  const Expr v0 = parse_expression("0.2*sin(y)");
  const Expr w0 = Expr::y();
  std::vector<double> hs, errs;
  for (int nx : {129, 257}) {
    HyperbolicOptions opt;
    opt.nx = nx;
    opt.x_end = 0.125;
    const HyperbolicSolution s = solve_hyperbolic_cauchy(lc, v0, w0, opt);
    const GridField vx = d_x(s.v);
    const Grid2D& g = s.v.grid;
    double err = 0.0;
    for (int j = s.row_lo[0] + 8; j <= s.row_hi[0] - 8; ++j) {
      const double y = g.y(j);
      CHECK(s.v(0, j) == v0.eval(0, y));
      CHECK(s.w(0, j) == w0.eval(0, y));
      const double expect = y - lc.alpha_ext(0, y).v * 0.2 * std::cos(y);
      err = std::max(err, std::abs(vx(0, j) - expect));
    }
    hs.push_back(g.hx());
    errs.push_back(err);
  }
  CHECK(errs[1] < errs[0]);
  CHECK(fitted_order(hs, errs) > 1.7);
}

TEST_CASE("local worked example realizes mu = 1, p = 0") {
  const LocalRealization r = assemble_local_realization(parse_expression("(x^2 - y^2)/2"), 0, 0);
  CHECK(r.tau == doctest::Approx(0.125));
  CHECK(std::abs(r.mu.max() - 1.0) <= 1e-8);
  CHECK(std::abs(r.mu.min() - 1.0) <= 1e-8);
  CHECK(r.p.max_abs() <= 1e-8);
  const LocalVerification v = verify_local(r);
  CHECK(v.max_residual() <= 1e-10);
  CHECK(v.interface_jump() <= 1e-10);
}

TEST_CASE("local realization of a rotated field") {
  const LocalRealization r = assemble_local_realization(parse_expression("x*y"), 0.2, -0.1, {1.0, 129});
  CHECK(r.orientation.rotated);
  // u' = x^2 - y^2 gives v = xy and the constant viscosity 2/4.
  CHECK(r.mu.min() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.mu.max() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.p.max_abs() <= 1e-8);
}
