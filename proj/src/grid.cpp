#include "strainreal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "strainreal/parallel.hpp"

namespace strainreal {

Grid2D::Grid2D(double x0_, double y0_, double x1_, double y1_, int nx_, int ny_)
    : x0(x0_), y0(y0_), x1(x1_), y1(y1_), nx(nx_), ny(ny_) {
  if (nx < 3 || ny < 3) throw std::invalid_argument("grid needs at least 3 nodes per axis");
  if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("grid bounds must be increasing");
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

double GridField::min() const { return *std::min_element(v.begin(), v.end()); }
double GridField::max() const { return *std::max_element(v.begin(), v.end()); }

GridField sample(const Expr& f, const Grid2D& g) {
  GridField out(g);
  parallel_for(static_cast<std::size_t>(g.ny), [&](std::size_t j) {
    const int jj = static_cast<int>(j);
    for (int i = 0; i < g.nx; ++i) out(i, jj) = f.eval(g.x(i), g.y(jj));
  });
  return out;
}

namespace {

// First and second derivative of a strided 1D line of n samples.
template <class Get, class Put>
void diff1(int n, double h, Get get, Put put) {
  put(0, (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h));
  for (int k = 1; k < n - 1; ++k) put(k, (get(k + 1) - get(k - 1)) / (2.0 * h));
  put(n - 1, (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2.0 * h));
}

template <class Get, class Put>
void diff2(int n, double h, Get get, Put put) {
  const double h2 = h * h;
  if (n >= 4) {
    put(0, (2.0 * get(0) - 5.0 * get(1) + 4.0 * get(2) - get(3)) / h2);
    put(n - 1, (2.0 * get(n - 1) - 5.0 * get(n - 2) + 4.0 * get(n - 3) - get(n - 4)) / h2);
  } else {
    put(0, (get(0) - 2.0 * get(1) + get(2)) / h2);
    put(n - 1, (get(0) - 2.0 * get(1) + get(2)) / h2);
  }
  for (int k = 1; k < n - 1; ++k) put(k, (get(k + 1) - 2.0 * get(k) + get(k - 1)) / h2);
}

template <bool AlongX, int Order>
GridField directional(const GridField& f) {
  const Grid2D& g = f.grid;
  GridField out(g);
  const int lines = AlongX ? g.ny : g.nx;
  const int n = AlongX ? g.nx : g.ny;
  const double h = AlongX ? g.hx() : g.hy();
  for (int l = 0; l < lines; ++l) {
    auto get = [&](int k) { return AlongX ? f(k, l) : f(l, k); };
    auto put = [&](int k, double val) { (AlongX ? out(k, l) : out(l, k)) = val; };
    if constexpr (Order == 1) {
      diff1(n, h, get, put);
    } else {
      diff2(n, h, get, put);
    }
  }
  return out;
}

}  // namespace

GridField d_x(const GridField& f) { return directional<true, 1>(f); }
GridField d_y(const GridField& f) { return directional<false, 1>(f); }
GridField d_xx(const GridField& f) { return directional<true, 2>(f); }
GridField d_yy(const GridField& f) { return directional<false, 2>(f); }
GridField d_xy(const GridField& f) { return d_x(d_y(f)); }

GridField combine(double sa, const GridField& a, double sb, const GridField& b) {
  GridField out(a.grid);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = sa * a.v[k] + sb * b.v[k];
  return out;
}

GridField multiply(const GridField& a, const GridField& b) {
  GridField out(a.grid);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = a.v[k] * b.v[k];
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

void require_nonempty(const GridField& f) {
  if (f.v.empty()) throw std::invalid_argument("refusing to export an empty grid");
}

}  // namespace

void write_csv(const std::string& path, const GridField& f) {
  require_nonempty(f);
  auto out = open_for_write(path);
  out << "x,y,value\n";
  for (int j = 0; j < f.grid.ny; ++j) {
    for (int i = 0; i < f.grid.nx; ++i) {
      out << format_double(f.grid.x(i)) << ',' << format_double(f.grid.y(j)) << ','
          << format_double(f(i, j)) << '\n';
    }
  }
}

void write_csv_matrix(const std::string& path, const GridField& v11, const GridField& v12,
                      const GridField& v21, const GridField& v22) {
  require_nonempty(v11);
  auto out = open_for_write(path);
  out << "x,y,v11,v12,v21,v22\n";
  const Grid2D& g = v11.grid;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      out << format_double(g.x(i)) << ',' << format_double(g.y(j)) << ','
          << format_double(v11(i, j)) << ',' << format_double(v12(i, j)) << ','
          << format_double(v21(i, j)) << ',' << format_double(v22(i, j)) << '\n';
    }
  }
}

void write_gnuplot(const std::string& path, const GridField& f) {
  require_nonempty(f);
  auto out = open_for_write(path);
  for (int j = 0; j < f.grid.ny; ++j) {
    if (j > 0) out << '\n';
    for (int i = 0; i < f.grid.nx; ++i) {
      out << format_double(f.grid.x(i)) << ' ' << format_double(f.grid.y(j)) << ' '
          << format_double(f(i, j)) << '\n';
    }
  }
}

}  // namespace strainreal

#include "strainreal/interp.hpp"

namespace strainreal {

double interpolate(const GridField& f, double x, double y) {
  const Grid2D& g = f.grid;
  const int ni = std::min(6, g.nx), nj = std::min(6, g.ny);
  const double si = (x - g.x0) / g.hx();
  const double sj = (y - g.y0) / g.hy();
  const int i0 = std::clamp(static_cast<int>(std::floor(si)) - (ni / 2 - 1), 0, g.nx - ni);
  const int j0 = std::clamp(static_cast<int>(std::floor(sj)) - (nj / 2 - 1), 0, g.ny - nj);
  double wi[6], wj[6];
  lagrange_weights(si, i0, ni, wi);
  lagrange_weights(sj, j0, nj, wj);
  double acc = 0.0;
  for (int b = 0; b < nj; ++b) {
    double row = 0.0;
    for (int a = 0; a < ni; ++a) row += wi[a] * f(i0 + a, j0 + b);
    acc += wj[b] * row;
  }
  return acc;
}

}  // namespace strainreal
