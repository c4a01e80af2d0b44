#pragma once

#include <array>
#include <memory>
#include <vector>

#include "strainreal/fields.hpp"
#include "strainreal/grid.hpp"
#include "strainreal/residual.hpp"
#include "strainreal/truncation.hpp"
#include "strainreal/wave_solver.hpp"

namespace strainreal {

/// Coefficients of the second-order equation for u = log mu attached to a
/// periodic perturbation U = MX + periodic.
///
/// When M12 + M21 = 0 the problem is moved to coordinates X = T X' with
/// T = [[1, 1], [1, -1]] and U'(X') = -T U(T X'); the sign of U' is then
/// chosen so that a > 0. mu(X) = mu'(T^{-1} X) undoes the rotation and the
/// sign does not affect curl Div(mu e).
struct WaveCoefficients {
  VelocityField original;
  VelocityField working;
  Mat2 M;  // working average
  bool rotated = false;
  bool flipped = false;
  /// A = e R_perp = [[a, b], [b, -a]].
  Expr a, b;
  /// Characteristic speeds (b -/+ sqrt(a^2 + b^2)) / a.
  Expr alpha, beta;
  double a_min = 0.0;
  double a_max = 0.0;
  double alpha_sup = 0.0;
  double beta_sup = 0.0;
  /// Infimum of beta - alpha on the unit cell.
  double gap_min = 0.0;

  std::array<double, 2> to_working(double x, double y) const;
};

/// Throws HypothesisError when U has no average, M is not trace-free,
/// M + M^T = 0, U - MX is not 1-periodic, or a vanishes somewhere.
WaveCoefficients wave_coefficients(const VelocityField& U);

/// U = MX + s (U - MX).
VelocityField scale_perturbation(const VelocityField& U, double s);

/// Local geometry of (x, y) -> (xi, eta) at one point.
struct CharacteristicFrame {
  double x = 0.0, y = 0.0;
  double xi = 0.0, eta = 0.0;
  double R_xi = 1.0, S_eta = 1.0;
  double xi_x = 0.0, xi_y = 0.0, eta_x = 0.0, eta_y = 0.0;
  double xi_xx = 0.0, xi_xy = 0.0, xi_yy = 0.0;
  double eta_xx = 0.0, eta_xy = 0.0, eta_yy = 0.0;
  double alpha = 0.0, beta = 0.0;

  double t() const { return 0.5 * (xi - eta); }
  double z() const { return 0.5 * (xi + eta); }
  /// det d(xi, eta)/d(x, y) = (beta - alpha) / (R_xi S_eta).
  double jacobian() const { return xi_x * eta_y - xi_y * eta_x; }
};

/// Characteristic coordinates: xi is constant along dY/dx = alpha(x, Y)
/// through (0, xi), eta along dY/dx = beta(x, Y). The curves R(x, xi),
/// S(x, eta) with their first and second anchor derivatives are tabulated by
/// RK4 on a lattice of step h and read back by degree-5 interpolation.
class CharacteristicDiffeo {
 public:
  CharacteristicDiffeo(const WaveCoefficients& c, double x_half, double anchor_half, double h);

  double R(double x, double xi) const;
  double S(double x, double eta) const;
  double x_half() const { return x_half_; }
  double anchor_half() const { return anchor_half_; }

  /// (x, y) -> (xi, eta); false outside the tabulated region.
  bool forward(double x, double y, double& xi, double& eta) const;
  /// (t, z) -> (x, y); false outside the tabulated region.
  bool inverse(double t, double z, double& x, double& y) const;
  CharacteristicFrame frame(double x, double y, double xi, double eta) const;

 private:
  const WaveCoefficients* c_;
  double x_half_, anchor_half_, h_;
  GridField r_, r_xi_, r_xixi_, s_, s_eta_, s_etaeta_;
};

/// Truncated transport of the u-equation to (t, z):
/// w_tt - w_zz = B_n grad w . grad w + V_n . grad w + h_n.
class CanonicalSystem {
 public:
  CanonicalSystem(const WaveCoefficients& c, const CharacteristicDiffeo& d, int n);

  int n() const { return n_; }
  /// Zero where (t, z) has no tabulated preimage.
  CanonicalCoeffs at(double t, double z) const;
  CanonicalCoeffs at_frame(const CharacteristicFrame& f) const;
  /// h_n with the alternative principal factor a^2 + 2 b^2,
  /// a R_xi S_eta / (2 (a^2 + 2 b^2)); kept for the audit.
  double h_printed(const CharacteristicFrame& f) const;
  bool slow_decay() const;
  const PeriodicTruncation& truncation_a() const { return a_; }

 private:
  const WaveCoefficients* c_;
  const CharacteristicDiffeo* d_;
  int n_;
  PeriodicTruncation a_, b_, lap_ux_, lap_uy_, lap_curl_;
};

struct GlobalOptions {
  double radius = 1.0;
  double h = 1.0 / 64;
  /// Truncation index; negative selects n_R.
  int n = -1;
  double epsilon_scale = 1.0;
  double blowup_sup = 50.0;
};

struct GlobalRealization {
  WaveCoefficients coeffs;
  int n = 0;
  int n_R = 0;
  double t_half = 0.0;
  double z_half = 0.0;
  WaveSolution wave;
  /// Original coordinates on [-R, R]^2.
  GridField u;
  GridField mu;
  bool blowup = false;
  double lifespan = 0.0;
  double jacobian_min = 0.0;
  ResidualReport residual;
  bool slow_decay = false;
  int unmapped_nodes = 0;

  bool established() const { return !blowup && unmapped_nodes == 0; }
};

/// Builds mu = exp(w(t(X), z(X))) on D(0, R) for U = MX + periodic.
GlobalRealization realize_global(const VelocityField& U, const GlobalOptions& opt);

/// u-equation residual A:D^2u + A grad u . grad u - R_perp lap U . grad u
/// + lap curl U / 2, which equals exp(-u) curl Div(exp(u) e(U)).
Expr wave_equation_residual(const VelocityField& U, const Expr& u);

struct PeriodizedAverage {
  GridField mu;
  /// sup of mu_j over the unit cell for j = 0..k.
  std::vector<double> sup_by_k;
};

/// mu_k = (2k + 1)^{-2} sum_{|p|, |q| <= k} mu0(x + p, y + q) on g.
PeriodizedAverage periodized_average(const Expr& mu0, int k, const Grid2D& g);

}  // namespace strainreal
