#include "strainreal/casebook.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "strainreal/errors.hpp"
#include "strainreal/quadrature.hpp"

namespace strainreal {

namespace {

using std::numbers::pi;

Expr sin2piy() { return Expr::sin(2.0 * Expr::pi() * Expr::y()); }

Expr as_function_of(const Expr& f, Var target, const char* name) {
  const bool dx = f.depends_on(Var::X), dy = f.depends_on(Var::Y);
  if (dx && dy) {
    throw HypothesisError(std::string(name) + " must depend on a single variable");
  }
  const Expr t = Expr::var(target);
  if (target == Var::X && dy) return substitute(f, Expr::y(), Expr::x());
  if (target == Var::Y && dx) return substitute(f, Expr::y(), t);
  return f;
}

}  // namespace

Expr counterexample_stream(double epsilon) {
  return -Expr::x() * Expr::y() +
         epsilon / (2.0 * pi * pi) * sin2piy();
}

VelocityField counterexample_field(double epsilon) {
  VelocityField U = stream_to_velocity(counterexample_stream(epsilon));
  U.average = Mat2{1, 0, 0, -1};
  U.periodic = true;
  return U;
}

double torus_obstruction(const Expr& mu, double epsilon, double r) {
  if (!(r > 0.0 && r < 0.5)) throw HypothesisError("obstruction needs 0 < r < 1/2");
  for (int k = 0; k < 32; ++k) {
    const double x = k / 32.0;
    for (double y : {r, -r}) {
      const double v = mu.eval(x, y);
      if (!(v > 0.0)) {
        throw HypothesisError("viscosity must be positive; mu(" + format_double(x) + ", " +
                              format_double(y) + ") = " + format_double(v));
      }
      if (std::abs(mu.eval(x + 1.0, y) - v) > 1e-10 * (1.0 + std::abs(v))) {
        throw HypothesisError("viscosity must be 1-periodic in x");
      }
    }
  }
  const double I =
      integrate([&](double x) { return mu.eval(x, r) + mu.eval(x, -r); }, 0.0, 1.0, 16, 1);
  return epsilon * std::sin(2.0 * pi * r) * I;
}

Expr printed_counterexample_equation(const Expr& u, double epsilon) {
  const Expr s = epsilon * sin2piy();
  const Expr c = epsilon * Expr::cos(2.0 * Expr::pi() * Expr::y());
  const Expr ux = differentiate(u, Var::X), uy = differentiate(u, Var::Y);
  const Expr lhs = 2.0 * differentiate(ux, Var::Y) - s * differentiate(ux, Var::X) +
                   s * differentiate(uy, Var::Y);
  const Expr rhs = -2.0 * ux * uy + s * ux * ux - s * uy * uy + 4.0 * Expr::pi() * c * uy -
                   4.0 * Expr::pi() * Expr::pi() * s;
  return rhs - lhs;
}

WaveResidualPair printed_wave_residual(const Expr& u, double epsilon, const Grid2D& g) {
  WaveResidualPair out;
  out.printed = printed_counterexample_equation(u, epsilon);
  out.general = -wave_equation_residual(counterexample_field(epsilon), u);
  out.printed_report = summarize(sample(out.printed, g));
  out.general_report = summarize(sample(out.general, g));
  return out;
}

SignAudit sign_convention_audit(const Expr& u, double epsilon, const std::vector<int>& nodes) {
  SignAudit out;
  const VelocityField U = counterexample_field(epsilon);
  const StrainField e = strain_of(U);
  const Expr mu = Expr::exp(u);
  const Expr printed = printed_counterexample_equation(u, epsilon);
  const Expr general = -wave_equation_residual(U, u);
  const Expr direct = curl_div(mu, e);
  std::vector<double> hs;
  for (int n : nodes) {
    const Grid2D g = Grid2D::square(1.0, n);
    if (n == nodes.back()) {
      out.printed_sup = summarize(sample(printed, g)).max_abs;
      out.general_sup = summarize(sample(general, g)).max_abs;
      out.direct_symbolic_sup = summarize(sample(direct, g)).max_abs;
    }
    const GridField mu_g = sample(mu, g);
    const GridField fd = curl_div_fd(mu_g, sample(e.e11, g), sample(e.e12, g));
    const GridField predicted = multiply(mu_g, sample(-general, g));
    out.nodes.push_back(n);
    out.direct_fd_sup.push_back(summarize(fd, 1).max_abs);
    out.consistency.push_back(summarize(combine(1.0, fd, -1.0, predicted), 1).max_abs);
    hs.push_back(g.hx());
  }
  out.consistency_order = nodes.size() >= 2 ? fitted_order(hs, out.consistency) : 0.0;
  return out;
}

std::optional<Expr> polynomial_antiderivative(const Expr& f, Var v) {
  const Expr t = Expr::var(v);
  const Var other = v == Var::X ? Var::Y : Var::X;
  if (f.depends_on(other)) return std::nullopt;
  switch (f.kind()) {
    case Expr::Kind::Const:
    case Expr::Kind::Pi:
      return f * t;
    case Expr::Kind::VarX:
    case Expr::Kind::VarY:
      return 0.5 * t * t;
    case Expr::Kind::Pow:
      if (f.children()[0] == t && f.exponent() >= 0) {
        return Expr::power(t, f.exponent() + 1) / static_cast<double>(f.exponent() + 1);
      }
      return std::nullopt;
    case Expr::Kind::Add: {
      std::vector<Expr> terms;
      for (const Expr& c : f.children()) {
        auto a = polynomial_antiderivative(c, v);
        if (!a) return std::nullopt;
        terms.push_back(*a);
      }
      return Expr::sum(terms);
    }
    case Expr::Kind::Mul: {
      std::vector<Expr> consts;
      std::optional<Expr> var_part;
      for (const Expr& c : f.children()) {
        if (!c.depends_on(v)) {
          consts.push_back(c);
        } else if (var_part) {
          return std::nullopt;
        } else {
          var_part = c;
        }
      }
      if (!var_part) return f * t;
      auto a = polynomial_antiderivative(*var_part, v);
      if (!a) return std::nullopt;
      consts.push_back(*a);
      return Expr::product(consts);
    }
    default:
      return std::nullopt;
  }
}

std::array<double, 2> VanishingFamily::velocity(double x, double y) const {
  if (U) return {U->ux.eval(x, y), U->uy.eval(x, y)};
  const double gy = integrate([&](double s) { return g.eval(0.0, s); }, 0.0, y, 16, 4);
  const double fx = integrate([&](double s) { return f.eval(s, 0.0); }, 0.0, x, 16, 4);
  return {2.0 * gy, 2.0 * fx};
}

VanishingFamily vanishing_family(const Expr& f_in, const Expr& g_in) {
  VanishingFamily fam;
  fam.f = as_function_of(f_in, Var::X, "f");
  fam.g = as_function_of(g_in, Var::Y, "g");
  fam.e = StrainField{Expr(0.0), fam.f + fam.g};
  const auto Fx = polynomial_antiderivative(fam.f, Var::X);
  const auto Gy = polynomial_antiderivative(fam.g, Var::Y);
  if (Fx && Gy) {
    VelocityField U;
    U.ux = 2.0 * *Gy;
    U.uy = 2.0 * *Fx;
    fam.U = U;
  }
  bool ok = std::abs(fam.f.eval(0.0, 0.0)) <= 1e-14 && std::abs(fam.g.eval(0.0, 0.0)) <= 1e-14;
  // Coarse enough that flat profiles such as exp(-1/x^2) stay representable.
  for (int k = 1; k <= 16 && ok; ++k) {
    for (double s : {k / 16.0, -k / 16.0}) {
      ok = ok && fam.f.eval(s, 0.0) > 0.0 && fam.g.eval(0.0, s) > 0.0;
    }
  }
  fam.admissible = ok;
  return fam;
}

PowerFit leading_order_fit(const Expr& f, Var v) {
  PowerFit fit;
  std::vector<double> lx, ly;
  for (int k = 4; k <= 12; ++k) {
    const double r = std::ldexp(1.0, -k);
    for (double s : {r, -r}) {
      const double val = v == Var::X ? f.eval(s, 0.0) : f.eval(0.0, s);
      if (!(val > 0.0) || !std::isfinite(std::log(val))) return fit;
      lx.push_back(std::log(r));
      ly.push_back(std::log(val));
    }
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.coefficient = std::exp(intercept);
  for (std::size_t i = 0; i < lx.size(); ++i) {
    fit.misfit = std::max(fit.misfit, std::abs(ly[i] - intercept - fit.exponent * lx[i]));
  }
  fit.ok = fit.misfit <= 0.05;
  return fit;
}

VanishingVerdict vanishing_viscosity(const Expr& f_in, const Expr& g_in, int samples) {
  const VanishingFamily fam = vanishing_family(f_in, g_in);
  if (!fam.admissible) {
    throw HypothesisError("f and g must vanish at 0 and be positive elsewhere on [-1, 1]");
  }
  VanishingVerdict out;
  out.fit_f = leading_order_fit(fam.f, Var::X);
  out.fit_g = leading_order_fit(fam.g, Var::Y);
  if (!out.fit_f.ok || !out.fit_g.ok) {
    out.verdict = "inconclusive";
    out.reason = "leading order of f or g is not numerically decidable (no power law on dyadic samples)";
    return out;
  }
  const bool quad_f = std::abs(out.fit_f.exponent - 2.0) <= 0.05;
  const bool quad_g = std::abs(out.fit_g.exponent - 2.0) <= 0.05;
  const double af = out.fit_f.coefficient, ag = out.fit_g.coefficient;
  if (!quad_f || !quad_g) {
    out.verdict = "not realizable";
    out.reason = "f and g must both vanish exactly to second order";
    return out;
  }
  if (std::abs(af - ag) > 0.01 * std::max(af, ag)) {
    out.verdict = "not realizable";
    out.reason = "leading coefficients of f and g must agree";
    return out;
  }
  out.verdict = "realizable";
  const double a = 0.5 * (af + ag);
  const Expr r2 = Expr::x() * Expr::x() + Expr::y() * Expr::y();
  const Expr mu = r2 / (fam.f + fam.g);
  out.mu = mu;
  out.mu_origin = 1.0 / a;

  const Expr res = curl_div(mu, fam.e);
  const Vec2Expr d = div(Mat2Expr{mu * fam.e.e11, mu * fam.e.e12, mu * fam.e.e12, -(mu * fam.e.e11)});
  for (int j = 0; j < samples; ++j) {
    for (int i = 0; i < samples; ++i) {
      const double x = -1.0 + 2.0 * i / (samples - 1), y = -1.0 + 2.0 * j / (samples - 1);
      if (x * x + y * y < 1e-20) continue;
      out.residual = std::max(out.residual, std::abs(res.eval(x, y)));
      out.divergence_error =
          std::max({out.divergence_error, std::abs(d.x.eval(x, y) - 2.0 * y),
                    std::abs(d.y.eval(x, y) - 2.0 * x)});
    }
  }
  for (int k = 0; k < 8; ++k) {
    const double th = k * pi / 4.0;
    out.origin_error = std::max(
        out.origin_error, std::abs(mu.eval(1e-3 * std::cos(th), 1e-3 * std::sin(th)) - out.mu_origin));
  }
  return out;
}

}  // namespace strainreal
