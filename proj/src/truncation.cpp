#include "strainreal/truncation.hpp"

#include <cmath>
#include <numbers>

#include "strainreal/errors.hpp"
#include "strainreal/grid.hpp"

namespace strainreal {

namespace {

using std::numbers::pi;

// (1 - u^2)^5 = sum c_k u^{2k}; its antiderivative on [-1, 1] is evaluated
// in u = 4 s.
constexpr double kBinom[6] = {1, -5, 10, -10, 5, -1};

double raw_cdf_u(double u) {
  double acc = 0.0;
  for (int k = 0; k <= 5; ++k) acc += kBinom[k] * std::pow(u, 2 * k + 1) / (2 * k + 1);
  return acc;
}

// Integral of (1 - u^2)^5 over [-1, 1] is 2 raw_cdf_u(1) = 512/693.
const double kMass = 2.0 * raw_cdf_u(1.0);

}  // namespace

double mollifier1(double s) {
  if (std::abs(s) >= 0.25) return 0.0;
  const double u = 4.0 * s;
  return 4.0 * std::pow(1.0 - u * u, 5) / kMass;
}

double mollifier_cdf(double x) {
  if (x <= -0.25) return 0.0;
  if (x >= 0.25) return 1.0;
  return 0.5 + raw_cdf_u(4.0 * x) / kMass;
}

double window1(double x) { return mollifier_cdf(x) - mollifier_cdf(x - 1.0); }

double window_n(double x, int n) { return mollifier_cdf(x + n) - mollifier_cdf(x - n - 1.0); }

PeriodicTruncation::PeriodicTruncation(const Expr& f, int cutoff, int samples) : f_(f) {
  const int N = samples;
  std::vector<double> vals(static_cast<std::size_t>(N) * N);
  double scale = 0.0;
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j < N; ++j) {
      vals[k * N + j] = f.eval(static_cast<double>(j) / N, static_cast<double>(k) / N);
      scale = std::max(scale, std::abs(vals[k * N + j]));
    }
  }
  // Declared periodicity is checked, never assumed.
  for (int s = 0; s < 16; ++s) {
    const double x = 0.173 + 0.0571 * s, y = 0.311 - 0.0419 * s;
    const double v = f.eval(x, y);
    if (std::abs(f.eval(x + 1.0, y) - v) > 1e-10 * (1.0 + scale) ||
        std::abs(f.eval(x, y + 1.0) - v) > 1e-10 * (1.0 + scale)) {
      throw HypothesisError("field declared 1-periodic is not periodic at (" + format_double(x) +
                            ", " + format_double(y) + ")");
    }
  }
  const int P = N / 2 - 1;
  // Separable DFT: along x for every row, then along y.
  std::vector<std::complex<double>> rows(static_cast<std::size_t>(2 * P + 1) * N);
  for (int k = 0; k < N; ++k) {
    for (int p = -P; p <= P; ++p) {
      std::complex<double> acc = 0.0;
      for (int j = 0; j < N; ++j) acc += vals[k * N + j] * std::polar(1.0, -2.0 * pi * p * j / N);
      rows[(p + P) * N + k] = acc / static_cast<double>(N);
    }
  }
  double cmax = 0.0;
  std::vector<FourierMode> all;
  for (int p = -P; p <= P; ++p) {
    for (int q = -P; q <= P; ++q) {
      std::complex<double> acc = 0.0;
      for (int k = 0; k < N; ++k) acc += rows[(p + P) * N + k] * std::polar(1.0, -2.0 * pi * q * k / N);
      acc /= static_cast<double>(N);
      cmax = std::max(cmax, std::abs(acc));
      all.push_back({p, q, acc});
    }
  }
  for (const auto& m : all) {
    if (std::abs(m.c) <= 1e-12 * std::max(cmax, 1e-300)) continue;
    if (std::abs(m.p) <= cutoff && std::abs(m.q) <= cutoff) {
      modes_.push_back(m);
    } else {
      tail_ += std::abs(m.c);
    }
  }
}

std::complex<double> PeriodicTruncation::coefficient(int p, int q) const {
  for (const auto& m : modes_) {
    if (m.p == p && m.q == q) return m.c;
  }
  return 0.0;
}

double PeriodicTruncation::series(double x, double y) const {
  double acc = 0.0;
  for (const auto& m : modes_) {
    const double ph = 2.0 * pi * (m.p * x + m.q * y);
    acc += m.c.real() * std::cos(ph) - m.c.imag() * std::sin(ph);
  }
  return acc;
}

double PeriodicTruncation::phi(double x, double y) const {
  const double h = window1(x) * window1(y);
  return h == 0.0 ? 0.0 : series(x, y) * h;
}

double PeriodicTruncation::truncated(double x, double y, int n) const {
  const double w = window_n(x, n) * window_n(y, n);
  return w == 0.0 ? 0.0 : series(x, y) * w;
}

double PeriodicTruncation::truncated_direct(double x, double y, int n) const {
  double acc = 0.0;
  for (int p = -n; p <= n; ++p) {
    for (int q = -n; q <= n; ++q) acc += phi(x + p, y + q);
  }
  return acc;
}

int PeriodicTruncation::smallest_n_for_disk(double radius) {
  return std::max(0, static_cast<int>(std::ceil(radius + 0.25 - 1e-12)));
}

int PeriodicTruncation::verified_n_for_disk(double radius, double tol) const {
  const int guess = smallest_n_for_disk(radius);
  for (int n = std::max(0, guess - 1);; ++n) {
    bool ok = true;
    constexpr int m = 41;
    for (int j = 0; j < m && ok; ++j) {
      for (int i = 0; i < m && ok; ++i) {
        const double x = -radius + 2.0 * radius * i / (m - 1);
        const double y = -radius + 2.0 * radius * j / (m - 1);
        if (x * x + y * y > radius * radius) continue;
        ok = std::abs(truncated(x, y, n) - f_.eval(x, y)) <= tol;
      }
    }
    if (ok) return n;
  }
}

}  // namespace strainreal
