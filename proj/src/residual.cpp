#include "strainreal/residual.hpp"

#include <cmath>
#include <stdexcept>

#include "strainreal/errors.hpp"

namespace strainreal {

ResidualReport summarize(const GridField& r, int margin, const PointMask& inside) {
  const Grid2D& g = r.grid;
  ResidualReport rep;
  rep.grid = g;
  double sum = 0.0;
  for (int j = margin; j < g.ny - margin; ++j) {
    for (int i = margin; i < g.nx - margin; ++i) {
      if (inside && !inside(g.x(i), g.y(j))) continue;
      const double a = std::abs(r(i, j));
      rep.max_abs = std::max(rep.max_abs, a);
      sum += a * a;
    }
  }
  rep.l2 = std::sqrt(sum * g.hx() * g.hy());
  return rep;
}

GridField curl_div_fd(const GridField& mu, const GridField& e11, const GridField& e12) {
  const GridField s11 = multiply(mu, e11);
  const GridField s12 = multiply(mu, e12);
  return combine(1.0, combine(1.0, d_xx(s12), -1.0, d_yy(s12)), -2.0, d_xy(s11));
}

void require_positive(const GridField& mu) {
  const Grid2D& g = mu.grid;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!(mu(i, j) > 0.0)) {
        throw HypothesisError("viscosity must be positive; mu = " + format_double(mu(i, j)) +
                              " at (" + format_double(g.x(i)) + ", " + format_double(g.y(j)) +
                              ")");
      }
    }
  }
}

RealizationResidual realization_residual(const Expr& mu, const VelocityField& U, const Grid2D& g,
                                         const PointMask& inside) {
  const GridField mu_grid = sample(mu, g);
  require_positive(mu_grid);
  const StrainField e = strain_of(U);
  RealizationResidual out;
  out.symbolic = summarize(sample(curl_div(mu, e), g), 1, inside);
  out.finite_difference =
      summarize(curl_div_fd(mu_grid, sample(e.e11, g), sample(e.e12, g)), 1, inside);
  return out;
}

ResidualReport realization_residual(const GridField& mu, const VelocityField& U,
                                    const PointMask& inside) {
  require_positive(mu);
  const StrainField e = strain_of(U);
  return summarize(curl_div_fd(mu, sample(e.e11, mu.grid), sample(e.e12, mu.grid)), 1, inside);
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) {
    throw std::invalid_argument("order fit needs at least two (h, error) pairs");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double lx = std::log(h[k]), ly = std::log(err[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace strainreal
