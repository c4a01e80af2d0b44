#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strainreal/fields.hpp"
#include "strainreal/grid.hpp"
#include "strainreal/residual.hpp"
#include "strainreal/wave_global.hpp"

namespace strainreal {

/// U_eps = (x - eps/pi cos(2 pi y), -y) with e(U_eps) = [[1, eps s], [eps s, -1]],
/// s = sin(2 pi y); average diag(1, -1).
VelocityField counterexample_field(double epsilon);
/// Stream function of U_eps.
Expr counterexample_stream(double epsilon);

/// eps sin(2 pi r) int_0^1 [mu(x, r) + mu(x, -r)] dx by composite
/// Gauss-Legendre. A positive value rules out mu (with any x-periodic
/// pressure) on the torus. Throws HypothesisError unless 0 < r < 1/2, mu is
/// positive and 1-periodic in x on samples.
double torus_obstruction(const Expr& mu, double epsilon, double r);

/// Residuals (right side minus left side) of the u-equation for U_eps, once
/// in the printed closed form and once assembled from the general equation.
struct WaveResidualPair {
  Expr printed;
  Expr general;
  ResidualReport printed_report;
  ResidualReport general_report;
};

Expr printed_counterexample_equation(const Expr& u, double epsilon);
WaveResidualPair printed_wave_residual(const Expr& u, double epsilon, const Grid2D& g);

/// Side-by-side residuals for a candidate u under U_eps on [-1, 1]^2: the
/// printed equation, the general equation, and curl Div(e^u e(U_eps)) by
/// finite differences. exp(u) times the general left-minus-right residual
/// equals the direct operator, so their gap must shrink at second order.
struct SignAudit {
  double printed_sup = 0.0;
  double general_sup = 0.0;
  double direct_symbolic_sup = 0.0;
  std::vector<int> nodes;
  std::vector<double> direct_fd_sup;
  std::vector<double> consistency;
  double consistency_order = 0.0;
};

SignAudit sign_convention_audit(const Expr& u, double epsilon,
                                const std::vector<int>& nodes = {33, 65, 129});

/// Separated-variables family with strain [[0, f + g], [f + g, 0]].
struct VanishingFamily {
  Expr f;  // in x
  Expr g;  // in y
  /// U = 2 (int_0^y g, int_0^x f) when both antiderivatives are polynomial.
  std::optional<VelocityField> U;
  StrainField e;
  /// f(0) = g(0) = 0 and both positive at sampled nonzero points.
  bool admissible = false;

  /// U by the symbolic form or by quadrature.
  std::array<double, 2> velocity(double x, double y) const;
};

/// f is read as a function of x, g as a function of y; an expression in the
/// other variable is renamed. Throws HypothesisError for mixed expressions.
VanishingFamily vanishing_family(const Expr& f, const Expr& g);

/// Antiderivative vanishing at 0 for polynomials in one variable.
std::optional<Expr> polynomial_antiderivative(const Expr& f, Var v);

struct PowerFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  /// Largest deviation of log|f| from the fitted line.
  double misfit = 0.0;
  bool ok = false;
};

/// Least-squares fit of log f(+-2^-k) against log 2^-k for k = 4..12.
PowerFit leading_order_fit(const Expr& f, Var v);

struct VanishingVerdict {
  /// "realizable", "not realizable" or "inconclusive".
  std::string verdict;
  std::string reason;
  PowerFit fit_f, fit_g;
  /// mu = (x^2 + y^2) / (f + g), 1/a at the origin.
  std::optional<Expr> mu;
  double mu_origin = 0.0;
  /// sup |curl Div(mu e)| on the sample grid without the origin.
  double residual = 0.0;
  /// sup |Div(mu e) - (2y, 2x)| on the same points.
  double divergence_error = 0.0;
  /// max |mu - 1/a| over 8 rays at radius 1e-3.
  double origin_error = 0.0;

  bool realizable() const { return verdict == "realizable"; }
};

VanishingVerdict vanishing_viscosity(const Expr& f, const Expr& g, int samples = 41);

}  // namespace strainreal
