#include <cmath>
#include <numbers>

#include "doctest.h"
#include "strainreal/casebook.hpp"
#include "strainreal/errors.hpp"

using namespace strainreal;
using std::numbers::pi;

TEST_CASE("counterexample strain") {
  const StrainField e = strain_of(counterexample_field(0.3));
  for (double y : {-0.4, 0.1, 0.77}) {
    CHECK(e.e11.eval(0.2, y) == doctest::Approx(1.0));
    CHECK(e.e12.eval(0.2, y) == doctest::Approx(0.3 * std::sin(2 * pi * y)).epsilon(1e-14));
  }
}

TEST_CASE("torus obstruction values") {
  CHECK(torus_obstruction(Expr(1.0), 0.1, 0.25) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(torus_obstruction(parse_expression("2 + cos(2*pi*x)"), 0.05, 0.125) ==
        doctest::Approx(0.05 * std::sin(pi / 4) * 4).epsilon(1e-14));
  const Expr mu = parse_expression("exp(sin(2*pi*x)*cos(3*y))");
  const double v1 = torus_obstruction(mu, 0.01, 0.2), v2 = torus_obstruction(mu, 0.02, 0.2);
  CHECK(v2 == doctest::Approx(2 * v1).epsilon(1e-14));
  CHECK_THROWS_AS(torus_obstruction(mu, 0.1, 0.5), HypothesisError);
  CHECK_THROWS_AS(torus_obstruction(mu, 0.1, 0.0), HypothesisError);
  CHECK_THROWS_AS(torus_obstruction(parse_expression("x"), 0.1, 0.2), HypothesisError);
}

TEST_CASE("obstruction is positive for sampled periodic viscosities") {
  const char* mus[] = {"1", "2 + cos(2*pi*x)", "exp(sin(2*pi*x) + y)", "1.1 + sin(2*pi*x)*sin(5*y)",
                       "3 + cos(4*pi*x)*y^2"};
  for (const char* m : mus) {
    const Expr mu = parse_expression(m);
    for (double eps : {0.01, 0.3, 1.0}) {
      for (double r : {0.05, 0.25, 0.45}) CHECK(torus_obstruction(mu, eps, r) > 0.0);
    }
  }
}

TEST_CASE("printed counterexample equation") {
  const Grid2D g = Grid2D::square(1.0, 33);
  for (double eps : {0.01, 0.1, 0.5}) {
    const WaveResidualPair p = printed_wave_residual(parse_expression("2*pi*x"), eps, g);
    CHECK(p.printed_report.max_abs <= 1e-12);
    // General equation: right minus left side for u = 2 pi x is
    // -8 pi^2 eps sin(2 pi y) (hand derivation).
    for (double y : {-0.3, 0.2, 0.4}) {
      CHECK(p.general.eval(0.1, y) ==
            doctest::Approx(-8 * pi * pi * eps * std::sin(2 * pi * y)).epsilon(1e-12));
    }
  }
  const WaveResidualPair z = printed_wave_residual(Expr(0.0), 0.1, g);
  CHECK(z.printed.eval(0.3, 0.1) == doctest::Approx(-4 * pi * pi * 0.1 * std::sin(0.2 * pi)));
  CHECK(z.printed_report.max_abs == doctest::Approx(4 * pi * pi * 0.1).epsilon(1e-3));
}

TEST_CASE("polynomial antiderivatives") {
  const auto a = polynomial_antiderivative(parse_expression("3*x^2 - 2*x + 5"), Var::X);
  REQUIRE(a);
  CHECK(a->eval(2.0, 0.0) == doctest::Approx(8.0 - 4.0 + 10.0));
  CHECK_FALSE(polynomial_antiderivative(parse_expression("sin(x)"), Var::X));
}

TEST_CASE("vanishing family fields") {
  const VanishingFamily fam = vanishing_family(parse_expression("x^2"), parse_expression("x^2"));
  REQUIRE(fam.U);
  CHECK(fam.admissible);
  CHECK(fam.U->ux.eval(0.4, 0.6) == doctest::Approx(2 * 0.216 / 3));
  CHECK(fam.U->uy.eval(0.4, 0.6) == doctest::Approx(2 * 0.064 / 3));
  const StrainField e = strain_of(*fam.U);
  CHECK(e.e11.eval(0.4, 0.6) == 0.0);
  CHECK(e.e12.eval(0.4, 0.6) == doctest::Approx(0.52));

  const VanishingFamily zero = vanishing_family(Expr(0.0), Expr(0.0));
  CHECK_FALSE(zero.admissible);
  CHECK(zero.velocity(0.3, 0.4)[0] == 0.0);

  const VanishingFamily quartic = vanishing_family(parse_expression("x^2"), parse_expression("y^4"));
  CHECK(quartic.admissible);

  const VanishingFamily trig = vanishing_family(parse_expression("1 - cos(x)"), parse_expression("y^2"));
  CHECK_FALSE(trig.U);
  const auto v = trig.velocity(0.5, 0.3);
  CHECK(v[1] == doctest::Approx(2 * (0.5 - std::sin(0.5))).epsilon(1e-13));
  CHECK(v[0] == doctest::Approx(2 * 0.009).epsilon(1e-13));
}

TEST_CASE("vanishing viscosity verdicts") {
  const VanishingVerdict r = vanishing_viscosity(parse_expression("x^2"), parse_expression("x^2"));
  CHECK(r.realizable());
  CHECK(r.mu_origin == doctest::Approx(1.0));
  CHECK(r.residual <= 1e-10);
  CHECK(r.divergence_error <= 1e-10);
  CHECK(r.origin_error <= 1e-6);
  REQUIRE(r.mu);
  CHECK(r.mu->eval(0.3, -0.7) == doctest::Approx(1.0));

  for (double a : {0.5, 3.0}) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g*x^2", a);
    const VanishingVerdict s = vanishing_viscosity(parse_expression(buf), parse_expression(buf));
    CHECK(s.realizable());
    CHECK(s.mu_origin == doctest::Approx(1.0 / a));
    CHECK(s.residual <= 1e-10);
    CHECK(s.origin_error <= 1e-6);
  }

  const VanishingVerdict q = vanishing_viscosity(parse_expression("x^2"), parse_expression("x^4"));
  CHECK(q.verdict == "not realizable");
  CHECK(q.fit_g.exponent == doctest::Approx(4.0).epsilon(1e-6));

  const VanishingVerdict c = vanishing_viscosity(parse_expression("2*x^2"), parse_expression("x^2"));
  CHECK(c.verdict == "not realizable");
  CHECK(c.fit_f.coefficient == doctest::Approx(2.0).epsilon(1e-9));

  const VanishingVerdict flat =
      vanishing_viscosity(parse_expression("exp(-1/x^2)"), parse_expression("y^2"));
  CHECK(flat.verdict == "inconclusive");

  CHECK_THROWS_AS(vanishing_viscosity(parse_expression("x^2 + 1"), parse_expression("y^2")),
                  HypothesisError);
}

TEST_CASE("sign-convention audit is internally consistent") {
  const SignAudit a = sign_convention_audit(parse_expression("2*pi*x"), 0.1);
  CHECK(a.printed_sup <= 1e-12);
  CHECK(a.general_sup == doctest::Approx(8 * pi * pi * 0.1).epsilon(1e-3));
  CHECK(a.direct_symbolic_sup == doctest::Approx(8 * pi * pi * 0.1 * std::exp(2 * pi)).epsilon(1e-2));
  // The h^2 error terms cancel for a linear u, so convergence is faster.
  CHECK(a.consistency_order >= 1.8);
  const SignAudit g = sign_convention_audit(parse_expression("x + 0.5*sin(3*y) + x*y"), 0.1);
  CHECK(g.consistency_order >= 1.8);
  CHECK(g.consistency_order <= 2.2);
}
