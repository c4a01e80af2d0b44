#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "strainreal/grid.hpp"

namespace strainreal {

/// Coefficients of w_tt - w_zz = B grad w . grad w + V . grad w + h with
/// grad w = (w_t, w_z) and B symmetric.
struct CanonicalCoeffs {
  double b11 = 0.0, b12 = 0.0, b22 = 0.0;
  double v1 = 0.0, v2 = 0.0;
  double h = 0.0;
};

using CanonicalField = std::function<CanonicalCoeffs(double t, double z)>;

struct WaveOptions {
  double dz = 1.0 / 64;
  double cfl = 0.9;
  double t_max = 1.0;
  /// Region of interest |z| <= z_half; the grid adds a margin so the
  /// Dirichlet ends cannot reach it.
  double z_half = 1.0;
  double blowup_sup = 50.0;
  bool backward = true;
};

struct WaveSolution {
  /// Axis x is t, axis y is z. Rows past a blow-up are NaN.
  GridField w;
  double k = 0.0;
  double dz = 0.0;
  bool blowup = false;
  /// |t| at which blow-up was detected, else t_max.
  double lifespan = 0.0;
  std::vector<double> energy_forward;
  std::vector<double> energy_backward;
};

/// Node layout used by solve_wave: t = i k - t_end, z = j dz - z_end.
Grid2D wave_grid(const WaveOptions& opt);

/// Leapfrog in t (step cfl * dz), centered in z, w_t from a second-order
/// backward difference, zero Cauchy data on t = 0. Marches both ways unless
/// options.backward is false.
WaveSolution solve_wave(const CanonicalField& f, const WaveOptions& opt);

/// Same grid as solve_wave with the coefficient field sampled once per node;
/// useful when evaluating f is expensive and several views are needed.
std::vector<CanonicalCoeffs> sample_coefficients(const CanonicalField& f, const Grid2D& g);

/// Duhamel integral of the linear problem w_tt - w_zz = h with zero data.
double duhamel(const std::function<double(double, double)>& h, double t, double z,
               int panels_per_unit = 8);

/// (1 - s^2)^4 on |s| < 1.
double sweep_bump(double s);
/// B = beta0 theta e1 e1^T, V = 0, h = amplitude theta with
/// theta = bump(t / 2) bump(z / 4).
CanonicalField sweep_model(double amplitude, double beta0 = 1.0);

struct SweepPoint {
  double amplitude = 0.0;
  bool blowup = false;
  double lifespan = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /// Smallest amplitude that blew up.
  std::optional<double> threshold;
};

/// Forward march of sweep_model over `steps` evenly spaced amplitudes in
/// [a0, a1].
SweepResult amplitude_sweep(double a0, double a1, int steps, const WaveOptions& opt,
                            double beta0 = 1.0);

}  // namespace strainreal
