#include "strainreal/wave_solver.hpp"

#include <cmath>
#include <limits>

#include "strainreal/errors.hpp"
#include "strainreal/parallel.hpp"
#include "strainreal/quadrature.hpp"

namespace strainreal {

namespace {

struct Layout {
  int steps = 0;  // per direction
  int half_z = 0;
  double k = 0.0;
};

Layout layout(const WaveOptions& opt) {
  if (!(opt.dz > 0.0) || !(opt.cfl > 0.0) || opt.cfl >= 1.0 || !(opt.t_max > 0.0)) {
    throw NumericalError("wave solver needs dz > 0, 0 < cfl < 1 and t_max > 0");
  }
  Layout l;
  l.k = opt.cfl * opt.dz;
  l.steps = std::max(2, static_cast<int>(std::ceil(opt.t_max / l.k - 1e-9)));
  l.half_z = static_cast<int>(std::ceil((opt.z_half + 1.2 * l.steps * l.k) / opt.dz)) + 4;
  return l;
}

double energy(const std::vector<double>& cur, const std::vector<double>& prev, double k,
              double dz) {
  double e = 0.0;
  const std::size_t n = cur.size();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double wt = (cur[j] - prev[j]) / k;
    const double wz = (cur[j + 1] - cur[j - 1]) / (2.0 * dz);
    e += 0.5 * (wt * wt + wz * wz) * dz;
  }
  return e;
}

}  // namespace

Grid2D wave_grid(const WaveOptions& opt) {
  const Layout l = layout(opt);
  return Grid2D(-l.steps * l.k, -l.half_z * opt.dz, l.steps * l.k, l.half_z * opt.dz,
                2 * l.steps + 1, 2 * l.half_z + 1);
}

std::vector<CanonicalCoeffs> sample_coefficients(const CanonicalField& f, const Grid2D& g) {
  std::vector<CanonicalCoeffs> out(g.size());
  parallel_for(g.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx % g.nx), j = static_cast<int>(idx / g.nx);
    out[idx] = f(g.x(i), g.y(j));
  });
  return out;
}

WaveSolution solve_wave(const CanonicalField& f, const WaveOptions& opt) {
  const Layout l = layout(opt);
  const int nz = 2 * l.half_z + 1;
  const double k = l.k, dz = opt.dz;
  WaveSolution sol;
  sol.k = k;
  sol.dz = dz;
  sol.w = GridField(wave_grid(opt), std::numeric_limits<double>::quiet_NaN());
  sol.lifespan = l.steps * k;
  auto z_of = [&](int j) { return (j - l.half_z) * dz; };

  std::vector<double> start(nz, 0.0);
  parallel_for(static_cast<std::size_t>(nz), [&](std::size_t j) {
    if (j == 0 || static_cast<int>(j) == nz - 1) return;
    start[j] = 0.5 * k * k * f(0.0, z_of(static_cast<int>(j))).h;
  });
  for (int j = 0; j < nz; ++j) sol.w(l.steps, j) = 0.0;

  const int directions = opt.backward ? 2 : 1;
  for (int d = 0; d < directions; ++d) {
    const double sigma = d == 0 ? 1.0 : -1.0;
    auto& hist = d == 0 ? sol.energy_forward : sol.energy_backward;
    std::vector<double> wm2 = start, wm1(nz, 0.0), wm = start, next(nz, 0.0);
    // Level -1 (opposite direction) holds the same Taylor value.
    for (int j = 0; j < nz; ++j) sol.w(l.steps + static_cast<int>(sigma), j) = wm[j];
    hist.push_back(0.0);
    hist.push_back(energy(wm, wm1, k, dz));
    for (int m = 1; m < l.steps; ++m) {
      const double t = sigma * m * k;
      parallel_for(static_cast<std::size_t>(nz), [&](std::size_t jj) {
        const int j = static_cast<int>(jj);
        if (j == 0 || j == nz - 1) {
          next[j] = 0.0;
          return;
        }
        const CanonicalCoeffs c = f(t, z_of(j));
        const double wt = sigma * (3.0 * wm[j] - 4.0 * wm1[j] + wm2[j]) / (2.0 * k);
        const double wz = (wm[j + 1] - wm[j - 1]) / (2.0 * dz);
        const double wzz = (wm[j + 1] - 2.0 * wm[j] + wm[j - 1]) / (dz * dz);
        const double rhs = c.b11 * wt * wt + 2.0 * c.b12 * wt * wz + c.b22 * wz * wz +
                           c.v1 * wt + c.v2 * wz + c.h;
        next[j] = 2.0 * wm[j] - wm1[j] + k * k * (wzz + rhs);
      });
      wm2.swap(wm1);
      wm1.swap(wm);
      wm.swap(next);
      double sup = 0.0;
      bool finite = true;
      for (double v : wm) {
        sup = std::max(sup, std::abs(v));
        finite = finite && std::isfinite(v);
      }
      const double e = energy(wm, wm1, k, dz);
      const double prev = hist.back();
      hist.push_back(e);
      if (!finite || sup > opt.blowup_sup || (m >= 10 && prev > 1e-8 && e > 2.0 * prev)) {
        if (!sol.blowup || (m + 1) * k < sol.lifespan) sol.lifespan = (m + 1) * k;
        sol.blowup = true;
        break;
      }
      const int col = l.steps + static_cast<int>(sigma) * (m + 1);
      for (int j = 0; j < nz; ++j) sol.w(col, j) = wm[j];
    }
  }
  return sol;
}

double duhamel(const std::function<double(double, double)>& h, double t, double z,
               int panels_per_unit) {
  const double sign = t >= 0.0 ? 1.0 : -1.0;
  const double T = std::abs(t);
  auto inner = [&](double s) {
    const double r = T - s;
    if (r <= 0.0) return 0.0;
    return integrate([&](double zeta) { return h(sign * s, zeta); }, z - r, z + r, 16,
                     panels_per_unit);
  };
  return 0.5 * integrate(inner, 0.0, T, 16, panels_per_unit);
}

double sweep_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return q * q * q * q;
}

CanonicalField sweep_model(double amplitude, double beta0) {
  return [amplitude, beta0](double t, double z) {
    const double th = sweep_bump(t / 2.0) * sweep_bump(z / 4.0);
    CanonicalCoeffs c;
    c.b11 = beta0 * th;
    c.h = amplitude * th;
    return c;
  };
}

SweepResult amplitude_sweep(double a0, double a1, int steps, const WaveOptions& opt,
                            double beta0) {
  if (steps < 1) throw NumericalError("amplitude sweep needs at least one step");
  SweepResult res;
  WaveOptions o = opt;
  o.backward = false;
  for (int s = 0; s < steps; ++s) {
    const double a = steps == 1 ? a0 : a0 + (a1 - a0) * s / (steps - 1);
    const WaveSolution w = solve_wave(sweep_model(a, beta0), o);
    res.points.push_back({a, w.blowup, w.lifespan});
    if (w.blowup && (!res.threshold || a < *res.threshold)) res.threshold = a;
  }
  return res;
}

}  // namespace strainreal
