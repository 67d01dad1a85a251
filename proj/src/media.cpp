#include "pat/media.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pat/errors.hpp"

namespace pat {

double smoothstep5(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double smoothstep5_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (t - 1.0) * (t - 1.0);
}

BoxCutoff::BoxCutoff(const Box& inner, const Box& outer) : inner_(inner), outer_(outer) {
  if (!(inner.width() > 0.0) || !(inner.height() > 0.0))
    throw ConfigError("cutoff inner box is degenerate");
  if (!inner.strictly_inside(outer)) throw ConfigError("cutoff inner box must lie strictly inside the outer box");
}

double BoxCutoff::band(double v, double lo_in, double hi_in, double lo_out, double hi_out, double* dband) {
  if (v < lo_in) {
    const double w = lo_in - lo_out;
    *dband = -1.0 / w;
    return (lo_in - v) / w;
  }
  if (v > hi_in) {
    const double w = hi_out - hi_in;
    *dband = 1.0 / w;
    return (v - hi_in) / w;
  }
  *dband = 0.0;
  return 0.0;
}

double BoxCutoff::operator()(Point p) const {
  double d;
  const double sx = band(p.x, inner_.xmin, inner_.xmax, outer_.xmin, outer_.xmax, &d);
  const double sy = band(p.y, inner_.ymin, inner_.ymax, outer_.ymin, outer_.ymax, &d);
  return smoothstep5(1.0 - sx) * smoothstep5(1.0 - sy);
}

Point BoxCutoff::gradient(Point p) const {
  double dsx, dsy;
  const double sx = band(p.x, inner_.xmin, inner_.xmax, outer_.xmin, outer_.xmax, &dsx);
  const double sy = band(p.y, inner_.ymin, inner_.ymax, outer_.ymin, outer_.ymax, &dsy);
  const double cx = smoothstep5(1.0 - sx), cy = smoothstep5(1.0 - sy);
  return {-smoothstep5_derivative(1.0 - sx) * dsx * cy, -cx * smoothstep5_derivative(1.0 - sy) * dsy};
}

SoundSpeedProfile SoundSpeedProfile::constant(double value) {
  if (!(value > 0.0)) throw ConfigError("sound speed must be positive");
  return SoundSpeedProfile(Kind::constant, value, BoxCutoff({-1, 1, -1, 1}, {-2, 2, -2, 2}));
}

SoundSpeedProfile SoundSpeedProfile::variable(const Box& domain, double collar, double transition) {
  if (!(collar > 0.0) || !(transition > 0.0)) throw ConfigError("collar and transition widths must be positive");
  if (2.0 * (collar + transition) >= std::min(domain.width(), domain.height()))
    throw ConfigError("sound speed collar is wider than half the domain");
  const Box outer = domain.shrunk(collar);
  return SoundSpeedProfile(Kind::variable, 1.0, BoxCutoff(outer.shrunk(transition), outer));
}

SoundSpeedProfile SoundSpeedProfile::radial(double value, double amplitude, double width) {
  if (!(value > 0.0) || !(value + std::min(amplitude, 0.0) > 0.0) || !(width > 0.0))
    throw ConfigError("radial sound speed must stay positive with positive width");
  SoundSpeedProfile p = constant(value);
  p.kind_ = Kind::radial;
  p.amplitude_ = amplitude;
  p.width_ = width;
  return p;
}

double SoundSpeedProfile::operator()(Point p) const {
  if (kind_ == Kind::constant) return value_;
  if (kind_ == Kind::radial) return value_ + amplitude_ * std::exp(-(p.x * p.x + p.y * p.y) / (width_ * width_));
  constexpr double tau = 2.0 * std::numbers::pi;
  return 1.0 + cutoff_(p) * (0.2 * std::sin(tau * p.x) + 0.1 * std::cos(tau * p.y));
}

Point SoundSpeedProfile::gradient(Point p) const {
  if (kind_ == Kind::constant) return {0.0, 0.0};
  if (kind_ == Kind::radial) {
    const double e = -2.0 * amplitude_ / (width_ * width_) * std::exp(-(p.x * p.x + p.y * p.y) / (width_ * width_));
    return {e * p.x, e * p.y};
  }
  constexpr double tau = 2.0 * std::numbers::pi;
  const double g = 0.2 * std::sin(tau * p.x) + 0.1 * std::cos(tau * p.y);
  const double chi = cutoff_(p);
  const Point dchi = cutoff_.gradient(p);
  return {dchi.x * g + chi * 0.2 * tau * std::cos(tau * p.x), dchi.y * g - chi * 0.1 * tau * std::sin(tau * p.y)};
}

double SoundSpeedProfile::max_value() const {
  switch (kind_) {
    case Kind::variable: return 1.3;
    case Kind::radial: return value_ + std::max(amplitude_, 0.0);
    default: return value_;
  }
}

void Medium::validate() const {
  if (!c.grid().same_as(a.grid())) throw ConfigError("sound speed and damping grids differ");
  if (!(c_floor > 0.0)) throw ConfigError("medium c_floor must be positive");
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!std::isfinite(c[k]) || c[k] < c_floor) throw ConfigError("sound speed below c_floor or not finite");
    if (!std::isfinite(a[k]) || a[k] < 0.0) throw ConfigError("damping must be finite and nonnegative");
  }
}

Medium Medium::restricted(const IndexBox& b) const { return {c.extract(b), a.extract(b), c_floor}; }

ScalarField2D sample(const Grid2D& grid, const SoundSpeedProfile& profile) {
  ScalarField2D out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out(i, j) = profile(grid.node(i, j));
  return out;
}

ScalarField2D make_sound_speed(const Grid2D& grid, const Box& domain, double collar_width, double transition) {
  return sample(grid, SoundSpeedProfile::variable(domain, collar_width, transition));
}

ScalarField2D make_damping(const Grid2D& grid, DampingKind kind, const ScalarField2D& c, const Box& domain,
                           double collar_width, double transition) {
  if (!c.grid().same_as(grid)) throw ConfigError("damping and sound speed grids differ");
  ScalarField2D a(grid);
  if (kind == DampingKind::none) return a;
  if (!(collar_width > 0.0) || 2.0 * (collar_width + transition) >= std::min(domain.width(), domain.height()))
    throw ConfigError("damping collar is wider than half the domain");
  const Box outer = domain.shrunk(collar_width);
  const BoxCutoff chi2(outer.shrunk(transition), outer);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Point p = grid.node(i, j);
      const double base = kind == DampingKind::linear ? 0.5 * (p.x + 1.0) : 2.0 * c(i, j);
      a(i, j) = std::max(0.0, chi2(p) * base);
    }
  }
  return a;
}

ScalarField2D smooth_cutoff(const Grid2D& grid, const Box& inner, const Box& outer) {
  const BoxCutoff chi(inner, outer);
  ScalarField2D out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out(i, j) = chi(grid.node(i, j));
  return out;
}

namespace {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Shepp & Logan (1974), original intensities.
constexpr std::array<Ellipse, 10> kSheppLogan{{
    {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.01, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.01, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.01, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.01, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
}};

}  // namespace

double shepp_logan_value(Point p) {
  double v = 0.0;
  for (const auto& e : kSheppLogan) {
    const double phi = e.phi_deg * std::numbers::pi / 180.0;
    const double dx = p.x - e.x0, dy = p.y - e.y0;
    const double u = dx * std::cos(phi) + dy * std::sin(phi);
    const double w = -dx * std::sin(phi) + dy * std::cos(phi);
    if ((u * u) / (e.a * e.a) + (w * w) / (e.b * e.b) <= 1.0) v += e.intensity;
  }
  return v;
}

ScalarField2D shepp_logan(const Grid2D& grid, Point center, double scale) {
  if (!(scale > 0.0)) throw ConfigError("phantom scale must be positive");
  ScalarField2D out(grid);
  const Box support = shepp_logan_support(center, scale);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Point p = grid.node(i, j);
      if (!support.contains(p)) continue;
      out(i, j) = shepp_logan_value({(p.x - center.x) / scale, (p.y - center.y) / scale});
    }
  }
  return out;
}

Box shepp_logan_support(Point center, double scale) {
  // The outer ellipse contains every other one.
  return {center.x - 0.69 * scale, center.x + 0.69 * scale, center.y - 0.92 * scale, center.y + 0.92 * scale};
}

namespace {

std::vector<double> gaussian_kernel(double sigma, double h) {
  const int r = static_cast<int>(std::ceil(4.0 * sigma / h));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int m = -r; m <= r; ++m) {
    const double x = m * h;
    k[m + r] = std::exp(-0.5 * x * x / (sigma * sigma));
    sum += k[m + r];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

ScalarField2D gaussian_smooth(const ScalarField2D& f, double sigma) {
  if (sigma < 0.0) throw ConfigError("smoothing sigma must be nonnegative");
  if (sigma == 0.0) return f;
  const Grid2D& g = f.grid();
  const auto kx = gaussian_kernel(sigma, g.dx);
  const auto ky = gaussian_kernel(sigma, g.dy);
  const int rx = static_cast<int>(kx.size() / 2), ry = static_cast<int>(ky.size() / 2);

  ScalarField2D tmp(g), out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double s = 0.0;
      for (int m = std::max(-rx, -i); m <= std::min(rx, g.nx - 1 - i); ++m) s += kx[m + rx] * f(i + m, j);
      tmp(i, j) = s;
    }
  }
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double s = 0.0;
      for (int m = std::max(-ry, -j); m <= std::min(ry, g.ny - 1 - j); ++m) s += ky[m + ry] * tmp(i, j + m);
      out(i, j) = s;
    }
  }
  return out;
}

namespace {

// Perimeter order used for arclength: bottom, right, top, left.
int perimeter_slot(Edge e) {
  switch (e) {
    case Edge::bottom: return 0;
    case Edge::right: return 1;
    case Edge::top: return 2;
    case Edge::left: return 3;
  }
  return 0;
}

}  // namespace

BoundaryAbsorption::BoundaryAbsorption(const Box& domain, std::vector<Edge> gamma_edges, double lambda_max,
                                       double taper, double lambda0)
    : domain_(domain), edges_(std::move(gamma_edges)), lambda_max_(lambda_max), taper_(taper), lambda0_(lambda0) {
  if (lambda_max_ < 0.0 || taper_ < 0.0 || lambda0_ < 0.0) throw ConfigError("lambda, taper and lambda0 must be nonnegative");
  if (edges_.empty()) return;

  std::array<bool, 4> on{};
  for (Edge e : edges_) on[perimeter_slot(e)] = true;
  const int count = static_cast<int>(std::count(on.begin(), on.end(), true));
  const std::array<double, 4> len{domain.width(), domain.height(), domain.width(), domain.height()};
  const std::array<double, 4> start{0.0, len[0], len[0] + len[1], len[0] + len[1] + len[2]};
  if (count == 4) {
    closed_ = true;
    arc_start_ = 0.0;
    arc_length_ = perimeter();
    return;
  }
  // The arc starts at an included slot whose predecessor is excluded.
  int first = -1;
  for (int s = 0; s < 4; ++s)
    if (on[s] && !on[(s + 3) % 4]) first = s;
  for (int k = 0; k < count; ++k)
    if (!on[(first + k) % 4]) throw ConfigError("observation edges must form one connected arc");
  arc_start_ = start[first];
  arc_length_ = 0.0;
  for (int k = 0; k < count; ++k) arc_length_ += len[(first + k) % 4];
  if (2.0 * taper_ > arc_length_) throw ConfigError("lambda taper is longer than half of Gamma");
}

bool BoundaryAbsorption::covers(Edge e) const { return std::find(edges_.begin(), edges_.end(), e) != edges_.end(); }

double BoundaryAbsorption::arclength(Point p) const {
  const double w = domain_.width(), h = domain_.height();
  const double tol = 1e-9 * std::max(w, h);
  if (!domain_.contains(p, tol)) return -1.0;
  if (std::abs(p.y - domain_.ymin) <= tol) return p.x - domain_.xmin;
  if (std::abs(p.x - domain_.xmax) <= tol) return w + (p.y - domain_.ymin);
  if (std::abs(p.y - domain_.ymax) <= tol) return w + h + (domain_.xmax - p.x);
  if (std::abs(p.x - domain_.xmin) <= tol) return 2.0 * w + h + (domain_.ymax - p.y);
  return -1.0;
}

double BoundaryAbsorption::at_arclength(double s) const {
  if (edges_.empty()) return 0.0;
  if (closed_) return lambda_max_;
  const double per = perimeter();
  double u = std::fmod(s - arc_start_, per);
  if (u < 0.0) u += per;
  if (u > arc_length_) return 0.0;
  if (taper_ == 0.0) return (u > 0.0 && u < arc_length_) ? lambda_max_ : 0.0;
  return lambda_max_ * smoothstep5(std::min(u, arc_length_ - u) / taper_);
}

double BoundaryAbsorption::operator()(Point p) const {
  const double s = arclength(p);
  if (s < 0.0) return 0.0;
  return at_arclength(s);
}

double BoundaryAbsorption::max_slope() const {
  if (closed_ || taper_ == 0.0) return closed_ ? 0.0 : lambda_max_;
  return 1.875 * lambda_max_ / taper_;
}

InitialSource InitialSource::zero(const Grid2D& grid, const Box& support) {
  return {ScalarField2D(grid), ScalarField2D(grid), support};
}

InitialSource InitialSource::pat(const ScalarField2D& f, const ScalarField2D& a, const Box& support) {
  if (!f.grid().same_as(a.grid())) throw ConfigError("source and damping grids differ");
  const IndexBox b = f.grid().nodes_in(support);
  InitialSource s{restrict_to(f, b), ScalarField2D(f.grid()), support};
  for (std::size_t k = 0; k < s.f1.size(); ++k) s.f2[k] = -a[k] * s.f1[k];
  return s;
}

InitialSource& InitialSource::operator+=(const InitialSource& o) {
  f1 += o.f1;
  f2 += o.f2;
  return *this;
}

InitialSource& InitialSource::operator-=(const InitialSource& o) {
  f1 -= o.f1;
  f2 -= o.f2;
  return *this;
}

InitialSource& InitialSource::operator*=(double s) {
  f1 *= s;
  f2 *= s;
  return *this;
}

InitialSource operator+(InitialSource a, const InitialSource& b) { return a += b; }
InitialSource operator-(InitialSource a, const InitialSource& b) { return a -= b; }
InitialSource operator*(double s, InitialSource a) { return a *= s; }

}  // namespace pat
