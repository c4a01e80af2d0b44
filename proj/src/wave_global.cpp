#include "strainreal/wave_global.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "strainreal/errors.hpp"
#include "strainreal/parallel.hpp"

namespace strainreal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CurveState {
  double r, r1, r2;
};

// dR/dx = speed(x, R) with the first and second variations in the anchor.
CurveState curve_rhs(const Expr& speed, double x, const CurveState& s) {
  const Jet j = speed.jet(x, s.r);
  return {j.v, j.y * s.r1, j.yy * s.r1 * s.r1 + j.y * s.r2};
}

CurveState rk4(const Expr& speed, double x, const CurveState& s, double dx) {
  auto add = [](const CurveState& a, const CurveState& k, double c) {
    return CurveState{a.r + c * k.r, a.r1 + c * k.r1, a.r2 + c * k.r2};
  };
  const CurveState k1 = curve_rhs(speed, x, s);
  const CurveState k2 = curve_rhs(speed, x + 0.5 * dx, add(s, k1, 0.5 * dx));
  const CurveState k3 = curve_rhs(speed, x + 0.5 * dx, add(s, k2, 0.5 * dx));
  const CurveState k4 = curve_rhs(speed, x + dx, add(s, k3, dx));
  return {s.r + dx / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
          s.r1 + dx / 6.0 * (k1.r1 + 2.0 * k2.r1 + 2.0 * k3.r1 + k4.r1),
          s.r2 + dx / 6.0 * (k1.r2 + 2.0 * k2.r2 + 2.0 * k3.r2 + k4.r2)};
}

void tabulate(const Expr& speed, GridField& r, GridField& r1, GridField& r2) {
  const Grid2D& g = r.grid;
  const int mid = (g.nx - 1) / 2;
  const double h = g.hx();
  constexpr int sub = 2;
  parallel_for(static_cast<std::size_t>(g.ny), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int dir : {1, -1}) {
      CurveState s{g.y(j), 1.0, 0.0};
      r(mid, j) = s.r;
      r1(mid, j) = s.r1;
      r2(mid, j) = s.r2;
      for (int i = mid; i != (dir > 0 ? g.nx - 1 : 0); i += dir) {
        double x = (i - mid) * h;
        for (int k = 0; k < sub; ++k) {
          s = rk4(speed, x, s, dir * h / sub);
          x += dir * h / sub;
        }
        r(i + dir, j) = s.r;
        r1(i + dir, j) = s.r1;
        r2(i + dir, j) = s.r2;
      }
    }
  });
}

// Geometry of one family: y = C(x, a) with C_a, C_aa, speed c.
void family_derivatives(const Jet& c, double c1, double c2, double& fx, double& fy, double& fxx,
                        double& fxy, double& fyy) {
  const double q = 1.0 / c1;
  fy = q;
  fx = -c.v * q;
  fxy = -c.y * q + c.v * c2 * q * q * q;
  fyy = -c2 * q * q * q;
  fxx = -c.x * q - c.v * fxy;
}

bool near(double a, double b, double scale) { return std::abs(a - b) <= 1e-10 * (1.0 + scale); }

}  // namespace

std::array<double, 2> WaveCoefficients::to_working(double x, double y) const {
  if (rotated) return {0.5 * (x + y), 0.5 * (x - y)};
  return {x, y};
}

VelocityField scale_perturbation(const VelocityField& U, double s) {
  if (!U.average) throw HypothesisError("scaling the perturbation needs the average M");
  const Mat2& M = *U.average;
  const Expr X = Expr::x(), Y = Expr::y();
  VelocityField out = U;
  out.ux = s * U.ux + (1.0 - s) * (M.m11 * X + M.m12 * Y);
  out.uy = s * U.uy + (1.0 - s) * (M.m21 * X + M.m22 * Y);
  return out;
}

WaveCoefficients wave_coefficients(const VelocityField& U) {
  if (!U.average) {
    throw HypothesisError("global realization needs the average M of U = MX + periodic");
  }
  const Mat2 M = *U.average;
  const double scale = std::sqrt(M.frobenius2());
  if (std::abs(M.trace()) > 1e-10 * (1.0 + scale)) {
    throw HypothesisError("average M must be trace-free for a divergence-free U");
  }
  const double sym = std::sqrt(4.0 * M.m11 * M.m11 + 2.0 * std::pow(M.m12 + M.m21, 2) +
                               4.0 * M.m22 * M.m22);
  if (sym <= 1e-12 * (1.0 + scale)) {
    throw HypothesisError("global realization requires M + M^T != 0");
  }
  for (int s = 0; s < 12; ++s) {
    const double x = -0.61 + 0.137 * s, y = 0.42 - 0.093 * s;
    const double px = U.ux.eval(x, y) - M.m11 * x - M.m12 * y;
    const double py = U.uy.eval(x, y) - M.m21 * x - M.m22 * y;
    const double vs = std::abs(px) + std::abs(py);
    const bool ok =
        near(U.ux.eval(x + 1, y) - M.m11 * (x + 1) - M.m12 * y, px, vs) &&
        near(U.uy.eval(x + 1, y) - M.m21 * (x + 1) - M.m22 * y, py, vs) &&
        near(U.ux.eval(x, y + 1) - M.m11 * x - M.m12 * (y + 1), px, vs) &&
        near(U.uy.eval(x, y + 1) - M.m21 * x - M.m22 * (y + 1), py, vs);
    if (!ok) {
      throw HypothesisError("U - MX is not 1-periodic near (" + format_double(x) + ", " +
                            format_double(y) + ")");
    }
  }

  WaveCoefficients c;
  c.original = U;
  c.working = U;
  c.M = M;
  c.rotated = std::abs(M.m12 + M.m21) <= 1e-12 * (1.0 + scale);
  if (c.rotated) {
    const Expr X = Expr::x() + Expr::y(), Y = Expr::x() - Expr::y();
    const Expr ux = substitute(U.ux, X, Y), uy = substitute(U.uy, X, Y);
    c.working.ux = -(ux + uy);
    c.working.uy = -(ux - uy);
    const double p = M.m11 + M.m21, q = M.m12 + M.m22, r = M.m11 - M.m21, s = M.m12 - M.m22;
    c.M = {-(p + q), -(p - q), -(r + s), -(r - s)};
  }
  if (c.M.m12 + c.M.m21 < 0.0) {
    c.flipped = true;
    c.working.ux = -c.working.ux;
    c.working.uy = -c.working.uy;
    c.M = {-c.M.m11, -c.M.m12, -c.M.m21, -c.M.m22};
  }
  c.working.average = c.M;
  c.working.periodic = true;

  const Expr& ux = c.working.ux;
  const Expr& uy = c.working.uy;
  c.a = 0.5 * (differentiate(uy, Var::X) + differentiate(ux, Var::Y));
  c.b = -differentiate(ux, Var::X);
  const Expr disc = Expr::sqrt(c.a * c.a + c.b * c.b);
  c.alpha = (c.b - disc) / c.a;
  c.beta = (c.b + disc) / c.a;

  constexpr int m = 64;
  c.a_min = std::numeric_limits<double>::infinity();
  c.a_max = -c.a_min;
  c.gap_min = c.a_min;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double x = static_cast<double>(i) / m, y = static_cast<double>(j) / m;
      const double av = c.a.eval(x, y), bv = c.b.eval(x, y);
      c.a_min = std::min(c.a_min, av);
      c.a_max = std::max(c.a_max, av);
      if (av <= 0.0) continue;
      const double d = std::sqrt(av * av + bv * bv);
      c.alpha_sup = std::max(c.alpha_sup, std::abs((bv - d) / av));
      c.beta_sup = std::max(c.beta_sup, std::abs((bv + d) / av));
      c.gap_min = std::min(c.gap_min, 2.0 * d / av);
    }
  }
  if (!(c.a_min > 1e-8 * (1.0 + std::abs(c.a_max)))) {
    throw HypothesisError("a = (d_x Uy + d_y Ux)/2 must stay away from zero; min a = " +
                          format_double(c.a_min) + ": the perturbation is too large");
  }
  return c;
}

CharacteristicDiffeo::CharacteristicDiffeo(const WaveCoefficients& c, double x_half,
                                           double anchor_half, double h)
    : c_(&c) {
  if (!(h > 0.0) || !(x_half > 0.0) || !(anchor_half > 0.0)) {
    throw NumericalError("characteristic lattice needs positive extents and step");
  }
  const int I = std::max(3, static_cast<int>(std::ceil(x_half / h - 1e-9)));
  const int J = std::max(3, static_cast<int>(std::ceil(anchor_half / h - 1e-9)));
  x_half_ = I * h;
  anchor_half_ = J * h;
  h_ = h;
  const Grid2D g(-x_half_, -anchor_half_, x_half_, anchor_half_, 2 * I + 1, 2 * J + 1);
  r_ = r_xi_ = r_xixi_ = s_ = s_eta_ = s_etaeta_ = GridField(g);
  tabulate(c.alpha, r_, r_xi_, r_xixi_);
  tabulate(c.beta, s_, s_eta_, s_etaeta_);
}

double CharacteristicDiffeo::R(double x, double xi) const { return interpolate(r_, x, xi); }
double CharacteristicDiffeo::S(double x, double eta) const { return interpolate(s_, x, eta); }

namespace {

// Root of an increasing function g on [lo, hi] by Newton with bisection
// fallback; slope is an estimate of g'.
template <class G, class D>
bool bracketed_root(G g, D slope, double lo, double hi, double start, double& root) {
  double glo = g(lo), ghi = g(hi);
  if (glo > 0.0 || ghi < 0.0) return false;
  double x = std::clamp(start, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double v = g(x);
    if (std::abs(v) <= 1e-14 * (1.0 + std::abs(x))) break;
    if (v < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 1e-15 * (1.0 + std::abs(x))) break;
    const double d = slope(x);
    double next = d > 0.0 ? x - v / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  root = x;
  return true;
}

}  // namespace

bool CharacteristicDiffeo::forward(double x, double y, double& xi, double& eta) const {
  if (std::abs(x) > x_half_) return false;
  const double A = anchor_half_;
  const bool ok_xi = bracketed_root([&](double a) { return interpolate(r_, x, a) - y; },
                                    [&](double a) { return interpolate(r_xi_, x, a); }, -A, A,
                                    y, xi);
  const bool ok_eta = ok_xi && bracketed_root([&](double a) { return interpolate(s_, x, a) - y; },
                                              [&](double a) { return interpolate(s_eta_, x, a); },
                                              -A, A, y, eta);
  return ok_xi && ok_eta;
}

bool CharacteristicDiffeo::inverse(double t, double z, double& x, double& y) const {
  const double xi = z + t, eta = z - t;
  if (std::abs(xi) > anchor_half_ || std::abs(eta) > anchor_half_) return false;
  // S(x, eta) - R(x, xi) increases in x since beta > alpha.
  auto g = [&](double s) { return interpolate(s_, s, eta) - interpolate(r_, s, xi); };
  auto slope = [&](double s) {
    return c_->beta.eval(s, interpolate(s_, s, eta)) - c_->alpha.eval(s, interpolate(r_, s, xi));
  };
  if (!bracketed_root(g, slope, -x_half_, x_half_, t, x)) return false;
  y = interpolate(r_, x, xi);
  return true;
}

CharacteristicFrame CharacteristicDiffeo::frame(double x, double y, double xi, double eta) const {
  CharacteristicFrame f;
  f.x = x;
  f.y = y;
  f.xi = xi;
  f.eta = eta;
  f.R_xi = interpolate(r_xi_, x, xi);
  f.S_eta = interpolate(s_eta_, x, eta);
  const Jet ja = c_->alpha.jet(x, y), jb = c_->beta.jet(x, y);
  f.alpha = ja.v;
  f.beta = jb.v;
  family_derivatives(ja, f.R_xi, interpolate(r_xixi_, x, xi), f.xi_x, f.xi_y, f.xi_xx, f.xi_xy,
                     f.xi_yy);
  family_derivatives(jb, f.S_eta, interpolate(s_etaeta_, x, eta), f.eta_x, f.eta_y, f.eta_xx,
                     f.eta_xy, f.eta_yy);
  return f;
}

CanonicalSystem::CanonicalSystem(const WaveCoefficients& c, const CharacteristicDiffeo& d, int n)
    : c_(&c),
      d_(&d),
      n_(n),
      a_(c.a),
      b_(c.b),
      lap_ux_(laplacian(c.working.ux)),
      lap_uy_(laplacian(c.working.uy)),
      lap_curl_(laplacian(curl(c.working))) {}

bool CanonicalSystem::slow_decay() const {
  return a_.slow_decay() || b_.slow_decay() || lap_ux_.slow_decay() || lap_uy_.slow_decay() ||
         lap_curl_.slow_decay();
}

CanonicalCoeffs CanonicalSystem::at(double t, double z) const {
  double x, y;
  if (!d_->inverse(t, z, x, y)) return {};
  return at_frame(d_->frame(x, y, z + t, z - t));
}

CanonicalCoeffs CanonicalSystem::at_frame(const CharacteristicFrame& f) const {
  const double W = window_n(f.x, n_) * window_n(f.y, n_);
  if (W == 0.0) return {};
  const double a = c_->a.eval(f.x, f.y), b = c_->b.eval(f.x, f.y);
  const double F = a * f.R_xi * f.S_eta / (a * a + b * b);
  const double an = W * a_.series(f.x, f.y), bn = W * b_.series(f.x, f.y);
  const double lux = W * lap_ux_.series(f.x, f.y), luy = W * lap_uy_.series(f.x, f.y);
  const double lc = W * lap_curl_.series(f.x, f.y);

  const double tx = 0.5 * (f.xi_x - f.eta_x), ty = 0.5 * (f.xi_y - f.eta_y);
  const double zx = 0.5 * (f.xi_x + f.eta_x), zy = 0.5 * (f.xi_y + f.eta_y);
  const double txx = 0.5 * (f.xi_xx - f.eta_xx), txy = 0.5 * (f.xi_xy - f.eta_xy),
               tyy = 0.5 * (f.xi_yy - f.eta_yy);
  const double zxx = 0.5 * (f.xi_xx + f.eta_xx), zxy = 0.5 * (f.xi_xy + f.eta_xy),
               zyy = 0.5 * (f.xi_yy + f.eta_yy);
  auto quad = [&](double px, double py, double qx, double qy) {
    return px * (an * qx + bn * qy) + py * (bn * qx - an * qy);
  };
  // R_perp lap U = (-lap Uy, lap Ux).
  const double rx = -luy, ry = lux;
  CanonicalCoeffs out;
  out.b11 = -F * quad(tx, ty, tx, ty);
  out.b12 = -F * quad(tx, ty, zx, zy);
  out.b22 = -F * quad(zx, zy, zx, zy);
  out.v1 = F * (tx * rx + ty * ry - (an * txx + 2.0 * bn * txy - an * tyy));
  out.v2 = F * (zx * rx + zy * ry - (an * zxx + 2.0 * bn * zxy - an * zyy));
  out.h = -0.5 * F * lc;
  return out;
}

double CanonicalSystem::h_printed(const CharacteristicFrame& f) const {
  const double W = window_n(f.x, n_) * window_n(f.y, n_);
  if (W == 0.0) return 0.0;
  const double a = c_->a.eval(f.x, f.y), b = c_->b.eval(f.x, f.y);
  return -a * f.R_xi * f.S_eta / (2.0 * (a * a + 2.0 * b * b)) * W *
         lap_curl_.series(f.x, f.y);
}

GlobalRealization realize_global(const VelocityField& U, const GlobalOptions& opt) {
  if (!(opt.radius > 0.0) || !(opt.h > 0.0) || opt.h > opt.radius) {
    throw NumericalError("global realization needs radius > 0 and 0 < h <= radius");
  }
  const VelocityField Us = opt.epsilon_scale == 1.0 ? U : scale_perturbation(U, opt.epsilon_scale);
  GlobalRealization out;
  out.coeffs = wave_coefficients(Us);
  const WaveCoefficients& c = out.coeffs;
  const double R = opt.radius, h = opt.h;
  const int n_out = static_cast<int>(std::lround(2.0 * R / h)) + 1;
  const Grid2D g_out = Grid2D::square(R, n_out);

  const double r_working = c.rotated ? R / std::sqrt(2.0) : R;
  out.n_R = PeriodicTruncation::smallest_n_for_disk(r_working);
  out.n = opt.n >= 0 ? opt.n : out.n_R;

  // Box of the working square in (t, z): |xi - y| <= sup|alpha| |x| and
  // likewise for eta.
  const double spread = 0.5 * (c.alpha_sup + c.beta_sup);
  out.t_half = spread * R + 6.0 * h;
  out.z_half = R * (1.0 + spread) + 6.0 * h;
  WaveOptions wo;
  wo.dz = h;
  wo.t_max = out.t_half;
  wo.z_half = out.z_half;
  wo.blowup_sup = opt.blowup_sup;
  const Grid2D wg = wave_grid(wo);

  std::unique_ptr<CharacteristicDiffeo> diffeo;
  std::unique_ptr<CanonicalSystem> system;
  std::vector<CanonicalCoeffs> table(wg.size());
  double factor = 1.0;
  for (int attempt = 0; attempt < 3; ++attempt, factor *= 1.5) {
    const double x_lat = factor * 2.0 * wg.x1 / c.gap_min + 8.0 * h;
    const double a_lat = factor * (wg.y1 + wg.x1) + 8.0 * h;
    diffeo = std::make_unique<CharacteristicDiffeo>(c, x_lat, a_lat, h);
    system = std::make_unique<CanonicalSystem>(c, *diffeo, out.n);
    std::atomic<int> missing{0};
    parallel_for(wg.size(), [&](std::size_t idx) {
      const int i = static_cast<int>(idx % wg.nx), j = static_cast<int>(idx / wg.nx);
      const double t = wg.x(i), z = wg.y(j);
      double x, y;
      if (!diffeo->inverse(t, z, x, y)) {
        table[idx] = {};
        ++missing;
        return;
      }
      table[idx] = system->at_frame(diffeo->frame(x, y, z + t, z - t));
    });
    out.unmapped_nodes = missing.load();
    if (out.unmapped_nodes == 0) break;
  }
  out.slow_decay = system->slow_decay();

  const CanonicalField lookup = [&](double t, double z) {
    const long i = std::lround((t - wg.x0) / wg.hx());
    const long j = std::lround((z - wg.y0) / wg.hy());
    return table[wg.index(static_cast<int>(i), static_cast<int>(j))];
  };
  out.wave = solve_wave(lookup, wo);
  out.blowup = out.wave.blowup;
  out.lifespan = out.wave.lifespan;

  out.u = GridField(g_out, kNaN);
  out.mu = GridField(g_out, kNaN);
  std::vector<double> jac(g_out.size(), std::numeric_limits<double>::infinity());
  std::atomic<int> missing{0};
  parallel_for(g_out.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx % g_out.nx), j = static_cast<int>(idx / g_out.nx);
    const auto p = c.to_working(g_out.x(i), g_out.y(j));
    double xi, eta;
    if (!diffeo->forward(p[0], p[1], xi, eta)) {
      ++missing;
      return;
    }
    const double w = interpolate(out.wave.w, 0.5 * (xi - eta), 0.5 * (xi + eta));
    out.u.v[idx] = w;
    out.mu.v[idx] = std::exp(w);
    const double x = g_out.x(i), y = g_out.y(j);
    if (x * x + y * y <= R * R * (1.0 + 1e-12)) {
      jac[idx] = diffeo->frame(p[0], p[1], xi, eta).jacobian();
    }
  });
  out.unmapped_nodes += missing.load();
  out.jacobian_min = *std::min_element(jac.begin(), jac.end());
  for (double v : out.mu.v) out.blowup = out.blowup || !std::isfinite(v);
  if (out.established()) {
    out.residual = realization_residual(out.mu, Us, [R](double x, double y) {
      return x * x + y * y <= R * R * (1.0 + 1e-12);
    });
  } else {
    out.residual.max_abs = kNaN;
    out.residual.l2 = kNaN;
  }
  return out;
}

Expr wave_equation_residual(const VelocityField& U, const Expr& u) {
  const StrainField e = strain_of(U);
  const Expr a = e.e12, b = -e.e11;
  const Expr ux = differentiate(u, Var::X), uy = differentiate(u, Var::Y);
  const Expr uxx = differentiate(ux, Var::X), uxy = differentiate(ux, Var::Y),
             uyy = differentiate(uy, Var::Y);
  const Vec2Expr lap = laplacian(Vec2Expr{U.ux, U.uy});
  const Expr hess = a * uxx + 2.0 * b * uxy - a * uyy;
  const Expr grad = a * ux * ux + 2.0 * b * ux * uy - a * uy * uy;
  const Expr drift = -lap.y * ux + lap.x * uy;
  return hess + grad - drift + 0.5 * laplacian(curl(U));
}

PeriodizedAverage periodized_average(const Expr& mu0, int k, const Grid2D& g) {
  if (k < 0) throw NumericalError("periodization index must be nonnegative");
  PeriodizedAverage out;
  out.mu = GridField(g);
  const double norm = 1.0 / ((2.0 * k + 1) * (2.0 * k + 1));
  parallel_for(g.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx % g.nx), j = static_cast<int>(idx / g.nx);
    double s = 0.0;
    for (int p = -k; p <= k; ++p) {
      for (int q = -k; q <= k; ++q) s += mu0.eval(g.x(i) + p, g.y(j) + q);
    }
    out.mu.v[idx] = norm * s;
  });
  constexpr int m = 33;
  for (int kk = 0; kk <= k; ++kk) {
    const double nk = 1.0 / ((2.0 * kk + 1) * (2.0 * kk + 1));
    double sup = 0.0;
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int p = -kk; p <= kk; ++p) {
          for (int q = -kk; q <= kk; ++q) {
            s += mu0.eval(static_cast<double>(i) / (m - 1) + p, static_cast<double>(j) / (m - 1) + q);
          }
        }
        sup = std::max(sup, std::abs(nk * s));
      }
    }
    out.sup_by_k.push_back(sup);
  }
  return out;
}

}  // namespace strainreal
