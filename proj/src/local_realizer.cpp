#include "strainreal/local_realizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "strainreal/errors.hpp"
#include "strainreal/fields.hpp"
#include "strainreal/interp.hpp"
#include "strainreal/parallel.hpp"

namespace strainreal {

// ---------------------------------------------------------------------------
// Orientation

void OrientationRecord::to_working(double x, double y, double& xw, double& yw) const {
  const double dx = x - center_x, dy = y - center_y;
  if (rotated) {
    xw = 0.5 * (dx + dy);
    yw = 0.5 * (dx - dy);
  } else {
    xw = dx;
    yw = dy;
  }
}

void OrientationRecord::to_original(double xw, double yw, double& x, double& y) const {
  if (rotated) {
    x = center_x + xw + yw;
    y = center_y + xw - yw;
  } else {
    x = center_x + xw;
    y = center_y + yw;
  }
}

double OrientationRecord::pressure_factor() const {
  return (rotated ? -0.5 : 1.0) * (flipped ? -1.0 : 1.0);
}

NormalizedStream normalize_orientation(const Expr& u, double center_x, double center_y) {
  NormalizedStream out;
  out.record.center_x = center_x;
  out.record.center_y = center_y;
  out.u = substitute(u, Expr::x() + Expr(center_x), Expr::y() + Expr(center_y));

  const Jet j = out.u.jet(0.0, 0.0);
  const double e11 = -j.xy, e12 = 0.5 * (j.xx - j.yy);
  const double norm = std::sqrt(2.0 * (e11 * e11 + e12 * e12));
  if (!(norm > 1e-10)) {
    throw HypothesisError("local realization requires e(U)(X*) != 0: strain vanishes at center (" +
                          format_double(center_x) + ", " + format_double(center_y) + ")");
  }
  double d = j.xx - j.yy;
  if (std::abs(d) < std::abs(2.0 * j.xy)) {
    out.u = substitute(out.u, Expr::x() + Expr::y(), Expr::x() - Expr::y());
    out.record.rotated = true;
    d = 4.0 * j.xy;
  }
  if (d < 0.0) {
    out.u = -out.u;
    out.record.flipped = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coefficients

namespace {

Jet alpha_of(const Jet& a) { return a - sqrt(a * a + Jet::constant(1.0)); }
Jet beta_of(const Jet& a) { return a + sqrt(a * a + Jet::constant(1.0)); }

// Nodes of [-r, r]^2 inside the closed disk, 81 per side.
template <class F>
void for_disk_samples(double r, F&& f) {
  constexpr int n = 81;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = -r + 2.0 * r * i / (n - 1);
      const double y = -r + 2.0 * r * j / (n - 1);
      if (x * x + y * y <= r * r * (1.0 + 1e-12)) f(x, y);
    }
  }
}

// Blended coefficient in unreflected coordinates.
Jet blended_a(const LocalCoefficients& lc, double x, double y) {
  const double r2 = x * x + y * y;
  const double inner = lc.rho() * lc.rho();
  const double outer = lc.disk_radius * lc.disk_radius;
  if (r2 <= inner) return lc.a.jet(x, y);
  if (r2 >= outer) return Jet::constant(lc.a_center);
  const double span = outer - inner;
  const Jet s{(r2 - inner) / span, 2.0 * x / span, 2.0 * y / span, 2.0 / span, 0.0, 2.0 / span};
  const double t = s.v;
  const double step = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  const double d1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
  const double d2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
  const Jet chi = Jet::constant(1.0) - chain(s, step, d1, d2);
  return Jet::constant(lc.a_center) + chi * (lc.a.jet(x, y) - Jet::constant(lc.a_center));
}

}  // namespace

Jet LocalCoefficients::a_ext(double x, double y) const {
  if (!reflected) return blended_a(*this, x, y);
  const Jet j = blended_a(*this, -x, y);
  return {-j.v, j.x, -j.y, -j.xx, j.xy, -j.yy};
}

Jet LocalCoefficients::alpha_ext(double x, double y) const { return alpha_of(a_ext(x, y)); }

Jet LocalCoefficients::beta_ext(double x, double y) const { return beta_of(a_ext(x, y)); }

double LocalCoefficients::gamma_ext(double x, double y) const {
  const Jet a0 = a_ext(x, y);
  const Jet al = alpha_of(a0);
  return -al.x - beta_of(a0).v * al.y;
}

LocalCoefficients LocalCoefficients::reflect() const {
  LocalCoefficients r = *this;
  r.reflected = !reflected;
  return r;
}

LocalCoefficients local_coefficients(const Expr& u, double disk_radius) {
  LocalCoefficients lc;
  lc.disk_radius = disk_radius;
  const Expr uxx = differentiate(u, Var::X, 2);
  const Expr uyy = differentiate(u, Var::Y, 2);
  const Expr uxy = differentiate(differentiate(u, Var::X), Var::Y);
  lc.denominator = uxx - uyy;
  double dmin = INFINITY;
  for_disk_samples(disk_radius, [&](double x, double y) {
    dmin = std::min(dmin, lc.denominator.eval(x, y));
  });
  if (!(dmin > 0.0)) {
    throw HypothesisError("local realization needs u_xx - u_yy > 0 on the disk of radius " +
                          format_double(disk_radius) + " (min " + format_double(dmin) +
                          "); shrink the disk");
  }
  lc.a = Expr(2.0) * uxy / lc.denominator;
  const Expr root = Expr::sqrt(lc.a * lc.a + Expr(1.0));
  lc.alpha = lc.a - root;
  lc.beta = lc.a + root;
  lc.gamma = -differentiate(lc.alpha, Var::X) - lc.beta * differentiate(lc.alpha, Var::Y);
  lc.a_center = lc.a.eval(0.0, 0.0);
  double sup = 0.0;
  for_disk_samples(disk_radius, [&](double x, double y) {
    const Jet a = lc.a_ext(x, y);
    sup = std::max(sup, std::abs(alpha_of(a).v) + std::abs(beta_of(a).v));
  });
  lc.c = 1.1 * sup;
  return lc;
}

LocalCoefficients local_coefficients_auto(const Expr& u) {
  for (double r = 1.0;; r *= 0.5) {
    try {
      return local_coefficients(u, r);
    } catch (const HypothesisError&) {
      if (r <= 1.0 / 64) throw;
    }
  }
}

// ---------------------------------------------------------------------------
// Hyperbolic Cauchy problem

namespace {

constexpr int kStencil = 8;

struct Stencil {
  int start = 0;
  std::array<double, kStencil> w{};
};

// Backward characteristic feet of every valid node at every earlier column.
struct FootTable {
  std::vector<std::size_t> offset;  // per node (i, j), index of column 0
  std::vector<Stencil> stencil;     // per (node, column k)
  std::vector<double> foot0;        // y at column 0 per node
};

double interpolate_column(const GridField& f, int k, const Stencil& s) {
  double acc = 0.0;
  for (int m = 0; m < kStencil; ++m) acc += s.w[m] * f(k, s.start + m);
  return acc;
}

}  // namespace

HyperbolicSolution solve_hyperbolic_cauchy(const LocalCoefficients& coeffs, const Expr& v0,
                                           const Expr& w0, const HyperbolicOptions& opt) {
  if (opt.nx < 17 || opt.nx % 2 == 0) throw std::invalid_argument("nx must be odd and >= 17");
  const int rows = opt.nx;
  const double h = 2.0 / (rows - 1);
  const int m = std::max(2, static_cast<int>(std::ceil(opt.x_end / h - 1e-9)));
  const Grid2D grid(0.0, -1.0, m * h, 1.0, m + 1, rows);

  HyperbolicSolution sol;
  sol.c = coeffs.c;
  sol.v = GridField(grid);
  sol.w = GridField(grid);
  sol.row_lo.resize(m + 1);
  sol.row_hi.resize(m + 1);
  for (int i = 0; i <= m; ++i) {
    sol.row_lo[i] = static_cast<int>(std::ceil(coeffs.c * i - 1e-9));
    sol.row_hi[i] = rows - 1 - sol.row_lo[i];
    if (sol.row_hi[i] - sol.row_lo[i] + 1 < kStencil) {
      throw NumericalError("dependence domain D_c is too thin at x = " + format_double(i * h) +
                           "; reduce x_end or refine the grid");
    }
  }
  auto node = [&](int i, int j) { return static_cast<std::size_t>(i) * rows + j; };

  const JetField alpha = [&](double x, double y) { return coeffs.alpha_ext(x, y); };
  const JetField beta = [&](double x, double y) { return coeffs.beta_ext(x, y); };

  auto build = [&](const JetField& speed, std::vector<double>* gamma_at) {
    FootTable t;
    t.offset.assign(static_cast<std::size_t>(m + 1) * rows, 0);
    t.foot0.assign(t.offset.size(), 0.0);
    std::size_t total = 0;
    for (int i = 0; i <= m; ++i) {
      for (int j = sol.row_lo[i]; j <= sol.row_hi[i]; ++j) {
        t.offset[node(i, j)] = total;
        total += i + 1;
      }
    }
    t.stencil.resize(total);
    if (gamma_at) gamma_at->assign(total, 0.0);
    parallel_for(static_cast<std::size_t>(m + 1), [&](std::size_t ii) {
      const int i = static_cast<int>(ii);
      for (int j = sol.row_lo[i]; j <= sol.row_hi[i]; ++j) {
        const std::size_t off = t.offset[node(i, j)];
        double y = -1.0 + j * h;
        for (int k = i; k >= 0; --k) {
          if (k < i) y = rk4_step(speed, (k + 1) * h, y, -h);
          const double s = (y + 1.0) / h;
          Stencil& st = t.stencil[off + k];
          st.start = stencil_start<kStencil>(s, sol.row_lo[k], sol.row_hi[k]);
          st.w = lagrange_weights<kStencil>(s, st.start);
          if (gamma_at) (*gamma_at)[off + k] = coeffs.gamma_ext(k * h, y);
        }
        t.foot0[node(i, j)] = y;
      }
    });
    return t;
  };

  std::vector<double> gamma_z;
  const FootTable Y = build(alpha, nullptr);
  const FootTable Z = build(beta, &gamma_z);

  for (int i = 0; i <= m; ++i) {
    for (int j = sol.row_lo[i]; j <= sol.row_hi[i]; ++j) {
      sol.v(i, j) = v0.eval(0.0, -1.0 + j * h);
      sol.w(i, j) = w0.eval(0.0, -1.0 + j * h);
    }
  }

  GridField vy(grid), v_new(grid), w_new(grid);
  int growth = 0;
  double previous = INFINITY;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    // d_y v on valid rows, one-sided at the edges of D_c.
    for (int i = 0; i <= m; ++i) {
      const int lo = sol.row_lo[i], hi = sol.row_hi[i];
      vy(i, lo) = (-3.0 * sol.v(i, lo) + 4.0 * sol.v(i, lo + 1) - sol.v(i, lo + 2)) / (2.0 * h);
      vy(i, hi) = (3.0 * sol.v(i, hi) - 4.0 * sol.v(i, hi - 1) + sol.v(i, hi - 2)) / (2.0 * h);
      for (int j = lo + 1; j < hi; ++j) vy(i, j) = (sol.v(i, j + 1) - sol.v(i, j - 1)) / (2.0 * h);
    }
    parallel_for(static_cast<std::size_t>(m + 1), [&](std::size_t ii) {
      const int i = static_cast<int>(ii);
      for (int j = sol.row_lo[i]; j <= sol.row_hi[i]; ++j) {
        const std::size_t n = node(i, j);
        const std::size_t oy = Y.offset[n], oz = Z.offset[n];
        double iv = 0.0, iw = 0.0;
        for (int k = 0; k <= i; ++k) {
          const double wt = (k == 0 || k == i) ? 0.5 * h : h;
          iv += wt * interpolate_column(sol.w, k, Y.stencil[oy + k]);
          iw += wt * gamma_z[oz + k] * interpolate_column(vy, k, Z.stencil[oz + k]);
        }
        if (i == 0) iv = iw = 0.0;
        v_new(i, j) = v0.eval(0.0, Y.foot0[n]) + iv;
        w_new(i, j) = w0.eval(0.0, Z.foot0[n]) - iw;
      }
    });
    double diff = 0.0;
    for (int i = 0; i <= m; ++i) {
      for (int j = sol.row_lo[i]; j <= sol.row_hi[i]; ++j) {
        diff = std::max({diff, std::abs(v_new(i, j) - sol.v(i, j)),
                         std::abs(w_new(i, j) - sol.w(i, j))});
      }
    }
    std::swap(sol.v, v_new);
    std::swap(sol.w, w_new);
    sol.iterations = iter;
    sol.last_difference = diff;
    sol.history.push_back(diff);
    if (diff <= opt.tolerance) return sol;
    growth = diff > previous ? growth + 1 : 0;
    if (growth >= 3) {
      throw NumericalError(
          "Picard iteration for the characteristic system is not contracting (difference grew "
          "three times in a row, last " +
          format_double(diff) + "); shrink the domain (smaller tau-max or disk)");
    }
    previous = diff;
  }
  if (sol.last_difference > 1e-6) {
    throw NumericalError("Picard iteration did not converge in " +
                         std::to_string(opt.max_iterations) + " sweeps (difference " +
                         format_double(sol.last_difference) + "); shrink the domain");
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

struct HalfFields {
  GridField v, mu, p;
};

// Copies the block [0, n h] x [-n h, n h] of a hyperbolic solution; mirrored
// blocks hold v(x, y) = v~(-x, y) on [-n h, 0].
GridField extract_block(const HyperbolicSolution& sol, int n, bool mirrored) {
  const double h = sol.v.grid.hx();
  const double tau = n * h;
  const int j0 = (sol.v.grid.ny - 1) / 2 - n;
  const Grid2D g = mirrored ? Grid2D(-tau, -tau, 0.0, tau, n + 1, 2 * n + 1)
                            : Grid2D(0.0, -tau, tau, tau, n + 1, 2 * n + 1);
  GridField out(g);
  for (int j = 0; j <= 2 * n; ++j) {
    for (int i = 0; i <= n; ++i) out(i, j) = sol.v(mirrored ? n - i : i, j0 + j);
  }
  return out;
}

HalfFields assemble_half(const GridField& v, const Expr& u) {
  HalfFields hf;
  hf.v = v;
  const GridField d = sample(differentiate(u, Var::X, 2) - differentiate(u, Var::Y, 2), v.grid);
  const GridField uxy = sample(differentiate(differentiate(u, Var::X), Var::Y), v.grid);
  const GridField vxy = d_xy(v);
  const GridField vyy = d_yy(v);
  hf.mu = GridField(v.grid);
  hf.p = GridField(v.grid);
  for (std::size_t k = 0; k < hf.mu.v.size(); ++k) {
    hf.mu.v[k] = 2.0 * vxy.v[k] / d.v[k];
    hf.p.v[k] = -hf.mu.v[k] * uxy.v[k] + vyy.v[k];
  }
  return hf;
}

// Value of a working-coordinate field at (xw, yw), read from the half square
// on the same side of the interface.
double read_halves(const GridField& minus, const GridField& plus, double xw, double yw) {
  if (xw > 0.0) return interpolate(plus, xw, yw);
  if (xw < 0.0) return interpolate(minus, xw, yw);
  return 0.5 * (interpolate(plus, 0.0, yw) + interpolate(minus, 0.0, yw));
}

}  // namespace

LocalRealization assemble_local_realization(const Expr& u, double center_x, double center_y,
                                            const LocalOptions& opt) {
  if (opt.nx < 17 || opt.nx % 2 == 0) throw std::invalid_argument("nx must be odd and >= 17");
  LocalRealization real;
  const NormalizedStream ns = normalize_orientation(u, center_x, center_y);
  real.orientation = ns.record;
  real.u_working = ns.u;
  real.coefficients = local_coefficients_auto(ns.u);
  const LocalCoefficients& lc = real.coefficients;

  real.h = 2.0 / (opt.nx - 1);
  real.tau_max = std::min({opt.tau_cap, 1.0 / (2.0 * lc.c), lc.rho() / std::sqrt(2.0)});
  const double tau_dyadic = std::exp2(std::floor(std::log2(real.tau_max) + 1e-12));
  const int n_max = static_cast<int>(std::floor(tau_dyadic / real.h + 1e-9));
  if (n_max < 2) {
    throw NumericalError("no admissible tau >= 2h (tau_max = " + format_double(real.tau_max) +
                         "); increase nx");
  }

  HyperbolicOptions ho;
  ho.nx = opt.nx;
  ho.x_end = (n_max + 2) * real.h;
  ho.tolerance = opt.tolerance;
  ho.max_iterations = opt.max_iterations;
  const Expr zero(0.0);
  const HyperbolicSolution plus = solve_hyperbolic_cauchy(lc, zero, Expr::y(), ho);
  const HyperbolicSolution minus = solve_hyperbolic_cauchy(lc.reflect(), zero, -Expr::y(), ho);
  real.picard_iterations = std::max(plus.iterations, minus.iterations);

  for (int n = n_max; n >= 2; n /= 2) {
    const double tau = n * real.h;
    if (tau > 1.0 - lc.c * tau + 1e-12) continue;
    const HalfFields hp = assemble_half(extract_block(plus, n, false), ns.u);
    const HalfFields hm = assemble_half(extract_block(minus, n, true), ns.u);
    const double vxy_min = std::min(d_xy(hp.v).min(), d_xy(hm.v).min());
    if (vxy_min < 0.5) continue;

    real.tau = tau;
    real.v_plus = hp.v;
    real.v_minus = hm.v;
    real.mu_plus = hp.mu;
    real.mu_minus = hm.mu;
    real.p_plus = hp.p;
    real.p_minus = hm.p;

    const OrientationRecord& rec = real.orientation;
    const Grid2D out(center_x - tau, center_y - tau, center_x + tau, center_y + tau, 2 * n + 1,
                     2 * n + 1);
    real.mu = GridField(out);
    real.p = GridField(out);
    const double pf = rec.pressure_factor();
    for (int j = 0; j < out.ny; ++j) {
      for (int i = 0; i < out.nx; ++i) {
        if (!rec.rotated) {
          // Nodes coincide with the working grid.
          const int jj = j;
          if (i < n) {
            real.mu(i, j) = hm.mu(i, jj);
            real.p(i, j) = pf * hm.p(i, jj);
          } else if (i > n) {
            real.mu(i, j) = hp.mu(i - n, jj);
            real.p(i, j) = pf * hp.p(i - n, jj);
          } else {
            real.mu(i, j) = 0.5 * (hp.mu(0, jj) + hm.mu(n, jj));
            real.p(i, j) = pf * 0.5 * (hp.p(0, jj) + hm.p(n, jj));
          }
          continue;
        }
        double xw, yw;
        rec.to_working(out.x(i), out.y(j), xw, yw);
        real.mu(i, j) = read_halves(hm.mu, hp.mu, xw, yw);
        real.p(i, j) = pf * read_halves(hm.p, hp.p, xw, yw);
      }
    }
    return real;
  }
  throw NumericalError(
      "no admissible tau: the square must lie in D_c with d_xy v >= 0.5 on both halves");
}

// ---------------------------------------------------------------------------
// Verification

namespace {

struct HalfResiduals {
  ResidualReport curl_div, orthogonality, wave;
};

HalfResiduals half_residuals(const GridField& v, const GridField& mu, const Expr& u) {
  const Grid2D& g = v.grid;
  const Expr uxy_e = differentiate(differentiate(u, Var::X), Var::Y);
  const Expr d_e = differentiate(u, Var::X, 2) - differentiate(u, Var::Y, 2);
  const GridField uxy = sample(uxy_e, g);
  const GridField d = sample(d_e, g);
  const GridField vxx = d_xx(v), vyy = d_yy(v), vxy = d_xy(v);
  GridField wave(g), orth(g), e11(g), e12(g);
  for (std::size_t k = 0; k < wave.v.size(); ++k) {
    const double a = 2.0 * uxy.v[k] / d.v[k];
    wave.v[k] = vxx.v[k] - vyy.v[k] + 2.0 * a * vxy.v[k];
    // e(U):e(V) with U = R_perp grad u, V = R_perp grad v.
    e11.v[k] = -uxy.v[k];
    e12.v[k] = 0.5 * d.v[k];
    orth.v[k] = 2.0 * (e11.v[k] * (-vxy.v[k]) + e12.v[k] * 0.5 * (vxx.v[k] - vyy.v[k]));
  }
  HalfResiduals r;
  r.wave = summarize(wave, 1);
  r.orthogonality = summarize(orth, 1);
  r.curl_div = summarize(curl_div_fd(mu, e11, e12), 2);
  return r;
}

ResidualReport merge(const ResidualReport& a, const ResidualReport& b) {
  ResidualReport r = a;
  r.max_abs = std::max(a.max_abs, b.max_abs);
  r.l2 = std::hypot(a.l2, b.l2);
  return r;
}

}  // namespace

double LocalVerification::interface_jump() const { return std::max({jump_mu, jump_p, jump_stress}); }

double LocalVerification::max_residual() const {
  return std::max({curl_div.max_abs, orthogonality.max_abs, wave.max_abs});
}

LocalVerification verify_local(const LocalRealization& real) {
  require_positive(real.mu_plus);
  require_positive(real.mu_minus);
  const HalfResiduals rp = half_residuals(real.v_plus, real.mu_plus, real.u_working);
  const HalfResiduals rm = half_residuals(real.v_minus, real.mu_minus, real.u_working);
  LocalVerification out;
  out.curl_div = merge(rp.curl_div, rm.curl_div);
  out.orthogonality = merge(rp.orthogonality, rm.orthogonality);
  out.wave = merge(rp.wave, rm.wave);

  const int n = real.mu_plus.grid.nx - 1;
  const GridField vxy_p = d_xy(real.v_plus), vxy_m = d_xy(real.v_minus);
  const GridField vyy_p = d_yy(real.v_plus), vyy_m = d_yy(real.v_minus);
  const StrainField e = strain_of(stream_to_velocity(real.u_working));
  for (int j = 0; j < real.mu_plus.grid.ny; ++j) {
    const double y = real.mu_plus.grid.y(j);
    const double dmu = std::abs(real.mu_plus(0, j) - real.mu_minus(n, j));
    out.jump_mu = std::max(out.jump_mu, dmu);
    out.jump_p = std::max(out.jump_p, std::abs(real.p_plus(0, j) - real.p_minus(n, j)));
    const double enorm = std::sqrt(2.0) * std::hypot(e.e11.eval(0.0, y), e.e12.eval(0.0, y));
    out.jump_stress = std::max(out.jump_stress, dmu * enorm);
    out.interface_vxy_error = std::max(
        {out.interface_vxy_error, std::abs(vxy_p(0, j) - 1.0), std::abs(vxy_m(n, j) - 1.0)});
    out.interface_vyy_error =
        std::max({out.interface_vyy_error, std::abs(vyy_p(0, j)), std::abs(vyy_m(n, j))});
  }
  return out;
}

}  // namespace strainreal
