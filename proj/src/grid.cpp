#include "pat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pat/errors.hpp"

namespace pat {

Grid2D::Grid2D(int nx_, int ny_, double dx_, double dy_, double x0_, double y0_)
    : nx(nx_), ny(ny_), dx(dx_), dy(dy_), x0(x0_), y0(y0_) {
  if (nx < 3 || ny < 3) throw ConfigError("grid needs at least 3 nodes per direction");
  if (!(dx > 0.0) || !(dy > 0.0)) throw ConfigError("grid spacing must be positive");
}

Grid2D Grid2D::covering(const Box& box, double spacing) {
  const int nx = static_cast<int>(std::lround(box.width() / spacing)) + 1;
  const int ny = static_cast<int>(std::lround(box.height() / spacing)) + 1;
  return Grid2D(nx, ny, spacing, spacing, box.xmin, box.ymin);
}

IndexBox Grid2D::nodes_in(const Box& box) const {
  constexpr double eps = 1e-6;
  IndexBox b;
  b.i0 = std::max(0, static_cast<int>(std::ceil((box.xmin - x0) / dx - eps)));
  b.i1 = std::min(nx - 1, static_cast<int>(std::floor((box.xmax - x0) / dx + eps)));
  b.j0 = std::max(0, static_cast<int>(std::ceil((box.ymin - y0) / dy - eps)));
  b.j1 = std::min(ny - 1, static_cast<int>(std::floor((box.ymax - y0) / dy + eps)));
  return b;
}

Grid2D Grid2D::sub(const IndexBox& b) const {
  return Grid2D(b.nx(), b.ny(), dx, dy, x(b.i0), y(b.j0));
}

bool Grid2D::same_as(const Grid2D& o, double tol) const {
  return nx == o.nx && ny == o.ny && std::abs(dx - o.dx) <= tol && std::abs(dy - o.dy) <= tol &&
         std::abs(x0 - o.x0) <= tol && std::abs(y0 - o.y0) <= tol;
}

ScalarField2D::ScalarField2D(const Grid2D& grid, double value)
    : grid_(grid), values_(grid.size(), value) {}

ScalarField2D::ScalarField2D(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ConfigError("field size does not match grid");
}

double ScalarField2D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField2D::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField2D::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool ScalarField2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField2D::sample(Point p) const {
  const double fx = std::clamp((p.x - grid_.x0) / grid_.dx, 0.0, double(grid_.nx - 1));
  const double fy = std::clamp((p.y - grid_.y0) / grid_.dy, 0.0, double(grid_.ny - 1));
  const int i = std::min(static_cast<int>(fx), grid_.nx - 2);
  const int j = std::min(static_cast<int>(fy), grid_.ny - 2);
  const double s = fx - i, t = fy - j;
  const auto& f = *this;
  return (1 - s) * (1 - t) * f(i, j) + s * (1 - t) * f(i + 1, j) + (1 - s) * t * f(i, j + 1) +
         s * t * f(i + 1, j + 1);
}

namespace {
void check_same(const ScalarField2D& a, const ScalarField2D& b) {
  if (!a.grid().same_as(b.grid())) throw ConfigError("field grids differ");
}
}  // namespace

ScalarField2D& ScalarField2D::operator+=(const ScalarField2D& o) {
  check_same(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField2D& ScalarField2D::operator-=(const ScalarField2D& o) {
  check_same(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField2D& ScalarField2D::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField2D ScalarField2D::extract(const IndexBox& b) const {
  ScalarField2D out(grid_.sub(b));
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) out(i - b.i0, j - b.j0) = (*this)(i, j);
  return out;
}

void ScalarField2D::embed(const ScalarField2D& patch, int i0, int j0) {
  const auto& pg = patch.grid();
  if (i0 < 0 || j0 < 0 || i0 + pg.nx > grid_.nx || j0 + pg.ny > grid_.ny)
    throw ConfigError("patch does not fit inside field");
  for (int j = 0; j < pg.ny; ++j)
    for (int i = 0; i < pg.nx; ++i) (*this)(i0 + i, j0 + j) = patch(i, j);
}

ScalarField2D operator+(ScalarField2D a, const ScalarField2D& b) { return a += b; }
ScalarField2D operator-(ScalarField2D a, const ScalarField2D& b) { return a -= b; }
ScalarField2D operator*(double s, ScalarField2D a) { return a *= s; }

ScalarField2D restrict_to(const ScalarField2D& f, const IndexBox& b) {
  ScalarField2D out(f.grid());
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) out(i, j) = f(i, j);
  return out;
}

}  // namespace pat
