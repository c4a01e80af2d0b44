#pragma once

#include <array>
#include <random>
#include <string>

#include "strainreal/fields.hpp"

namespace strainreal {

using Vec2 = std::array<double, 2>;

/// Two-phase rank-one laminate: strain E1 where chi(X . xi) = 1 and E2
/// elsewhere, with E1 - E2 = lambda xi (.) R_perp xi.
struct LaminateField {
  Mat2 E1, E2;
  Vec2 xi{1.0, 0.0};
  double lambda = 0.0;
  /// Volume fraction of phase 1 in the periodic square-wave profile; the
  /// decision does not depend on it.
  double chi_fraction = 0.5;

  Mat2 strain_at(double x, double y) const;
};

struct LaminateRealization {
  double mu1 = 1.0, mu2 = 1.0;
  double mu_ratio = 1.0;
  /// p1 - p2.
  double pressure_jump = 0.0;
  /// Component of (mu1 E1 - mu2 E2) xi along R_perp xi.
  double cross_residual = 0.0;
};

/// Symmetric product xi (.) R_perp xi.
Mat2 laminate_direction(const Vec2& xi);
/// E R_perp xi . xi.
double normal_shear(const Mat2& E, const Vec2& xi);

/// lambda with E1 - E2 = lambda xi (.) R_perp xi. Throws HypothesisError for
/// non-symmetric or non-trace-free phases, non-unit xi, or a jump that is not
/// of that form.
double strain_compatibility(const Mat2& E1, const Mat2& E2, const Vec2& xi);
LaminateField make_laminate(const Mat2& E1, const Mat2& E2, const Vec2& xi);

/// E1:E2 > (|E1|^2 |E2|^2 + (E1:E2)^2) / (|E1|^2 + |E2|^2) or E1 = E2,
/// evaluated exactly from Frobenius products.
bool is_realizable(const Mat2& E1, const Mat2& E2);
/// (E1 R_perp xi . xi)(E2 R_perp xi . xi) > 0 or E1 = E2.
bool sign_test(const Mat2& E1, const Mat2& E2, const Vec2& xi);

/// Viscosities with mu1 mu2 = 1 and the pressure jump. Throws
/// HypothesisError quoting the failed inequality.
LaminateRealization realize_laminate(const Mat2& E1, const Mat2& E2, const Vec2& xi);

/// Scans mu1/mu2 over `ratio_grid` log-spaced values in [1e-6, 1e6] for a
/// sign change of the cross component and refines it by bisection.
bool brute_force_realizable(const Mat2& E1, const Mat2& E2, const Vec2& xi,
                            int ratio_grid = 2001);

/// Random compatible pair: xi uniform on the circle, E2 entries and lambda
/// uniform in [-2, 2].
LaminateField random_compatible_pair(std::mt19937_64& rng);

std::string describe(const Mat2& m);

}  // namespace strainreal
