#pragma once

#include <string>
#include <vector>

#include "strainreal/characteristics.hpp"
#include "strainreal/expr.hpp"
#include "strainreal/grid.hpp"
#include "strainreal/residual.hpp"

namespace strainreal {

/// Transforms applied to bring the stream function into working position:
/// X = center + T X' with T = [[1, 1], [1, -1]] when rotated, and u negated
/// when flipped.
struct OrientationRecord {
  double center_x = 0.0;
  double center_y = 0.0;
  bool rotated = false;
  bool flipped = false;

  /// Working coordinates of an original point.
  void to_working(double x, double y, double& xw, double& yw) const;
  /// Original coordinates of a working point.
  void to_original(double xw, double yw, double& x, double& y) const;
  /// Factor mapping working pressure to original pressure.
  double pressure_factor() const;
};

struct NormalizedStream {
  Expr u;  // working stream function, u_xx - u_yy > 0 at the origin
  OrientationRecord record;
};

/// Throws HypothesisError when |e(U)(center)| <= 1e-10.
NormalizedStream normalize_orientation(const Expr& u, double center_x, double center_y);

/// Coefficients of the first-order system for v, w, with a extended off the
/// disk by a quintic blend towards a(0) on radii [rho, 2 rho].
struct LocalCoefficients {
  Expr a, alpha, beta, gamma;  // symbolic, valid on the disk
  Expr denominator;            // u_xx - u_yy
  double c = 0.0;              // 1.1 sup(|alpha| + |beta|)
  double disk_radius = 1.0;    // 2 rho
  double a_center = 0.0;
  /// Use a~(x, y) = -a(-x, y) for the x <= 0 problem.
  bool reflected = false;

  double rho() const { return 0.5 * disk_radius; }
  Jet a_ext(double x, double y) const;
  Jet alpha_ext(double x, double y) const;
  Jet beta_ext(double x, double y) const;
  double gamma_ext(double x, double y) const;
  LocalCoefficients reflect() const;
};

/// Coefficients on the disk of the given radius. Throws HypothesisError with
/// shrink advice if u_xx - u_yy <= 0 somewhere on it.
LocalCoefficients local_coefficients(const Expr& u_working, double disk_radius);

/// Largest radius among 1, 1/2, ..., 1/64 on which the coefficients exist.
LocalCoefficients local_coefficients_auto(const Expr& u_working);

struct HyperbolicOptions {
  int nx = 257;  // nodes on the data line [-1, 1]
  double x_end = 0.25;
  double tolerance = 1e-10;
  int max_iterations = 50;
};

/// (v, w) on D_c = {x >= 0, |y| <= 1 - c x} sampled on x = i h, y = -1 + j h.
struct HyperbolicSolution {
  GridField v, w;
  std::vector<int> row_lo, row_hi;  // valid rows per column
  double c = 0.0;
  int iterations = 0;
  double last_difference = 0.0;
  std::vector<double> history;

  bool valid(int i, int j) const { return j >= row_lo[i] && j <= row_hi[i]; }
};

HyperbolicSolution solve_hyperbolic_cauchy(const LocalCoefficients& coeffs, const Expr& v0,
                                           const Expr& w0, const HyperbolicOptions& opt);

struct LocalOptions {
  double tau_cap = 1.0;
  int nx = 257;
  double tolerance = 1e-10;
  int max_iterations = 50;
};

struct LocalRealization {
  double tau = 0.0;
  double h = 0.0;
  double tau_max = 0.0;
  OrientationRecord orientation;
  Expr u_working;
  LocalCoefficients coefficients;
  int picard_iterations = 0;
  // Working-coordinate half squares [0, tau] x [-tau, tau] and
  // [-tau, 0] x [-tau, tau].
  GridField v_plus, v_minus, mu_plus, mu_minus, p_plus, p_minus;
  // Square around the original center, original coordinates.
  GridField mu, p;
};

LocalRealization assemble_local_realization(const Expr& u, double center_x, double center_y,
                                            const LocalOptions& opt = {});

struct LocalVerification {
  ResidualReport curl_div;
  ResidualReport orthogonality;
  ResidualReport wave;
  double jump_mu = 0.0;
  double jump_p = 0.0;
  double jump_stress = 0.0;
  double interface_vxy_error = 0.0;  // |v_xy(0, .) - 1|
  double interface_vyy_error = 0.0;  // |v_yy(0, .)|

  double interface_jump() const;
  double max_residual() const;
};

/// Residuals on each half square in working coordinates; derivatives never
/// straddle the interface x = 0, where mu is only continuous.
LocalVerification verify_local(const LocalRealization& real);

}  // namespace strainreal
