#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "strainreal/expr.hpp"

namespace strainreal {

/// Uniform tensor grid on [x0, x1] x [y0, y1] with nx x ny nodes.
struct Grid2D {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  int nx = 3, ny = 3;

  Grid2D() = default;
  Grid2D(double x0_, double y0_, double x1_, double y1_, int nx_, int ny_);
  /// Square [-r, r]^2 with n nodes per side.
  static Grid2D square(double r, int n) { return {-r, -r, r, r, n, n}; }

  double hx() const { return (x1 - x0) / (nx - 1); }
  double hy() const { return (y1 - y0) / (ny - 1); }
  double x(int i) const { return i == nx - 1 ? x1 : x0 + i * hx(); }
  double y(int j) const { return j == ny - 1 ? y1 : y0 + j * hy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

/// Nodal values on a Grid2D, stored with x fastest.
struct GridField {
  Grid2D grid;
  std::vector<double> v;

  GridField() = default;
  explicit GridField(const Grid2D& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

  double& operator()(int i, int j) { return v[grid.index(i, j)]; }
  double operator()(int i, int j) const { return v[grid.index(i, j)]; }

  double max_abs() const;
  double min() const;
  double max() const;
};

/// Evaluates f at every node (parallel, deterministic).
GridField sample(const Expr& f, const Grid2D& g);

// Second-order differences: centered inside, one-sided second order on the
// boundary rows and columns.
GridField d_x(const GridField& f);
GridField d_y(const GridField& f);
GridField d_xx(const GridField& f);
GridField d_yy(const GridField& f);
GridField d_xy(const GridField& f);

/// Pointwise a*sa + b*sb.
GridField combine(double sa, const GridField& a, double sb, const GridField& b);
GridField multiply(const GridField& a, const GridField& b);

/// CSV "x,y,value", outer loop over y, 17 significant digits.
void write_csv(const std::string& path, const GridField& f);
/// CSV "x,y,v11,v12,v21,v22" for a matrix field.
void write_csv_matrix(const std::string& path, const GridField& v11, const GridField& v12,
                      const GridField& v21, const GridField& v22);
/// gnuplot blocks: one block per y row, each line "x y value", blank line
/// between blocks.
void write_gnuplot(const std::string& path, const GridField& f);

std::string format_double(double v);

}  // namespace strainreal

namespace strainreal {

/// Degree-5 tensor Lagrange interpolation; stencils are clamped to the grid.
double interpolate(const GridField& f, double x, double y);

}  // namespace strainreal
