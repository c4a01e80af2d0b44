#pragma once

#include <complex>
#include <vector>

#include "strainreal/expr.hpp"

namespace strainreal {

/// One-dimensional mollifier C (1 - 16 s^2)^5 on |s| < 1/4 with unit integral.
double mollifier1(double s);
/// Its distribution function (exact polynomial, 0 below -1/4, 1 above 1/4).
double mollifier_cdf(double x);
/// Mollified indicator of [0, 1]; support [-1/4, 5/4], integer translates
/// sum to 1.
double window1(double x);
/// sum_{p=-n}^{n} window1(x + p); equals 1 on [-n + 1/4, n + 3/4].
double window_n(double x, int n);

struct FourierMode {
  int p = 0, q = 0;
  std::complex<double> c;
};

/// Compactly supported decomposition of a 1-periodic field:
/// phi_f = (Fourier series of f) * h with h(x, y) = window1(x) window1(y).
class PeriodicTruncation {
 public:
  /// Coefficients from a samples x samples trapezoid grid of the unit cell;
  /// modes with |p|, |q| <= cutoff are kept. Throws HypothesisError if f is
  /// not 1-periodic on sampled points.
  explicit PeriodicTruncation(const Expr& f, int cutoff = 32, int samples = 128);

  std::complex<double> coefficient(int p, int q) const;
  const std::vector<FourierMode>& modes() const { return modes_; }
  /// Sum of |f^(p,q)| over resolved modes beyond the cutoff.
  double tail() const { return tail_; }
  bool slow_decay() const { return tail_ > 1e-6; }

  /// Truncated Fourier series of f.
  double series(double x, double y) const;
  double phi(double x, double y) const;
  /// [f]_n(x, y) = sum_{|p|, |q| <= n} phi(x + p, y + q).
  double truncated(double x, double y, int n) const;
  /// The same sum evaluated term by term.
  double truncated_direct(double x, double y, int n) const;

  /// min{n : window_n(x) window_n(y) = 1 on D(0, R)} from support arithmetic.
  static int smallest_n_for_disk(double radius);
  /// Smallest n whose truncation matches f on sampled points of D(0, R)
  /// within tol, starting the search at max(0, smallest_n_for_disk - 1).
  int verified_n_for_disk(double radius, double tol = 1e-10) const;

 private:
  Expr f_;
  std::vector<FourierMode> modes_;
  double tail_ = 0.0;
};

}  // namespace strainreal
