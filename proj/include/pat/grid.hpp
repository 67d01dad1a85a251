#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pat {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class Edge { left = 0, right = 1, bottom = 2, top = 3 };

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Box {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(Point p, double tol = 0.0) const {
    return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol && p.y <= ymax + tol;
  }
  Box shrunk(double d) const { return {xmin + d, xmax - d, ymin + d, ymax - d}; }
  bool strictly_inside(const Box& outer) const {
    return xmin > outer.xmin && xmax < outer.xmax && ymin > outer.ymin && ymax < outer.ymax;
  }
  bool operator==(const Box&) const = default;
};

/// Inclusive node-index rectangle [i0, i1] x [j0, j1].
struct IndexBox {
  int i0 = 0, i1 = -1, j0 = 0, j1 = -1;

  int nx() const { return i1 - i0 + 1; }
  int ny() const { return j1 - j0 + 1; }
  bool empty() const { return i1 < i0 || j1 < j0; }
  bool contains(int i, int j) const { return i >= i0 && i <= i1 && j >= j0 && j <= j1; }
  bool on_boundary(int i, int j) const {
    return contains(i, j) && (i == i0 || i == i1 || j == j0 || j == j1);
  }
  bool operator==(const IndexBox&) const = default;
};

/// Uniform node grid; node (i, j) sits at (x0 + i*dx, y0 + j*dy), storage index i + nx*j.
struct Grid2D {
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;
  double x0 = 0.0, y0 = 0.0;

  Grid2D() = default;
  Grid2D(int nx_, int ny_, double dx_, double dy_, double x0_ = 0.0, double y0_ = 0.0);

  /// Square-cell grid whose nodes span `box` exactly.
  static Grid2D covering(const Box& box, double spacing);

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * static_cast<std::size_t>(j);
  }
  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dy; }
  Point node(int i, int j) const { return {x(i), y(j)}; }
  Box bounds() const { return {x0, x(nx - 1), y0, y(ny - 1)}; }
  IndexBox all() const { return {0, nx - 1, 0, ny - 1}; }

  /// Nodes whose coordinates lie inside `box`.
  IndexBox nodes_in(const Box& box) const;
  Grid2D sub(const IndexBox& b) const;

  bool same_as(const Grid2D& other, double tol = 1e-12) const;
  bool operator==(const Grid2D&) const = default;
};

class ScalarField2D {
 public:
  ScalarField2D() = default;
  explicit ScalarField2D(const Grid2D& grid, double value = 0.0);
  ScalarField2D(const Grid2D& grid, std::vector<double> values);

  const Grid2D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double max_abs() const;
  double max() const;
  double min() const;
  bool all_finite() const;

  /// Bilinear interpolation; points outside the grid are clamped to it.
  double sample(Point p) const;

  ScalarField2D& operator+=(const ScalarField2D& o);
  ScalarField2D& operator-=(const ScalarField2D& o);
  ScalarField2D& operator*=(double s);

  ScalarField2D extract(const IndexBox& b) const;
  /// Writes `patch` into this field with its (0,0) node at (i0, j0).
  void embed(const ScalarField2D& patch, int i0, int j0);

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

ScalarField2D operator+(ScalarField2D a, const ScalarField2D& b);
ScalarField2D operator-(ScalarField2D a, const ScalarField2D& b);
ScalarField2D operator*(double s, ScalarField2D a);

/// Copy of `f` with everything outside the index box set to zero.
ScalarField2D restrict_to(const ScalarField2D& f, const IndexBox& b);

}  // namespace pat
