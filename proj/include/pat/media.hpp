#pragma once

#include <array>
#include <vector>

#include "pat/grid.hpp"

namespace pat {

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 on [0, 1], clamped outside.
double smoothstep5(double t);
double smoothstep5_derivative(double t);

/// Smooth box cutoff: 1 on `inner`, 0 outside `outer`, product of per-axis
/// quintic smoothsteps in between.
class BoxCutoff {
 public:
  BoxCutoff(const Box& inner, const Box& outer);

  double operator()(Point p) const;
  Point gradient(Point p) const;

  const Box& inner() const { return inner_; }
  const Box& outer() const { return outer_; }

 private:
  // Distance past the inner box along one axis, normalised by the band width.
  static double band(double v, double lo_in, double hi_in, double lo_out, double hi_out, double* dband);

  Box inner_;
  Box outer_;
};

/// The analytic sound speed c = 1 + chi1 * (0.2 sin(2 pi x) + 0.1 cos(2 pi y)),
/// a constant, or a radial Gaussian bump. Gradients are exact so rays do not see grid artefacts.
class SoundSpeedProfile {
 public:
  static SoundSpeedProfile constant(double value);
  /// chi1 = 1 on domain shrunk by collar + transition, 0 within `collar` of the domain edge.
  static SoundSpeedProfile variable(const Box& domain, double collar, double transition = 0.1);
  /// c = value + amplitude exp(-|x|^2 / width^2).
  static SoundSpeedProfile radial(double value, double amplitude, double width);

  double operator()(Point p) const;
  Point gradient(Point p) const;
  double max_value() const;

 private:
  enum class Kind { constant, variable, radial };
  SoundSpeedProfile(Kind kind, double value, BoxCutoff cutoff) : kind_(kind), value_(value), cutoff_(cutoff) {}

  Kind kind_;
  double value_;
  BoxCutoff cutoff_;
  double amplitude_ = 0.0, width_ = 1.0;
};

enum class DampingKind { none, linear, speed_proportional };

struct Medium {
  ScalarField2D c;
  ScalarField2D a;
  double c_floor = 0.0;

  const Grid2D& grid() const { return c.grid(); }
  /// Throws ConfigError unless c >= c_floor > 0, a >= 0 and both fields share one grid.
  void validate() const;
  Medium restricted(const IndexBox& b) const;
};

ScalarField2D sample(const Grid2D& grid, const SoundSpeedProfile& profile);

/// Samples the variable speed over `grid`; c = 1 outside `domain` shrunk by `collar_width`.
ScalarField2D make_sound_speed(const Grid2D& grid, const Box& domain, double collar_width,
                               double transition = 0.1);

/// linear: chi2 * 0.5 (x + 1); speed_proportional: chi2 * 2 c. chi2 vanishes within
/// `collar_width` of the domain edge and outside it.
ScalarField2D make_damping(const Grid2D& grid, DampingKind kind, const ScalarField2D& c,
                           const Box& domain, double collar_width, double transition = 0.1);

ScalarField2D smooth_cutoff(const Grid2D& grid, const Box& inner, const Box& outer);

/// Canonical (unmodified) 10-ellipse Shepp-Logan phantom evaluated at p.
double shepp_logan_value(Point p);
/// Phantom mapped by x -> center + scale * x.
ScalarField2D shepp_logan(const Grid2D& grid, Point center, double scale);
/// Bounding box of the mapped phantom support.
Box shepp_logan_support(Point center, double scale);

/// Separable discrete Gaussian (truncated at 4 sigma, zero padding); sigma = 0 is identity.
ScalarField2D gaussian_smooth(const ScalarField2D& f, double sigma);

/// Boundary absorption lambda along the perimeter of `domain`. Gamma is a connected arc
/// made of whole edges; lambda = lambda_max on it except for a smoothstep taper of
/// arclength `taper` at each free end.
class BoundaryAbsorption {
 public:
  BoundaryAbsorption() = default;
  BoundaryAbsorption(const Box& domain, std::vector<Edge> gamma_edges, double lambda_max,
                     double taper, double lambda0);

  /// Lambda at a point of the domain boundary (0 off the boundary).
  double operator()(Point p) const;
  double at_arclength(double s) const;
  /// Counter-clockwise arclength from (xmin, ymin).
  double arclength(Point p) const;
  double perimeter() const { return 2.0 * (domain_.width() + domain_.height()); }

  bool empty() const { return edges_.empty() || lambda_max_ <= 0.0; }
  bool in_gamma(Point p) const { return (*this)(p) > 0.0; }
  bool in_gamma0(Point p) const { return (*this)(p) > lambda0_; }
  bool covers(Edge e) const;

  const Box& domain() const { return domain_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double lambda_max() const { return lambda_max_; }
  double lambda0() const { return lambda0_; }
  double taper() const { return taper_; }
  /// Largest slope of the taper, the bound on adjacent-node jumps per unit arclength.
  double max_slope() const;

 private:
  Box domain_;
  std::vector<Edge> edges_;
  double lambda_max_ = 0.0;
  double taper_ = 0.0;
  double lambda0_ = 0.0;
  bool closed_ = false;
  double arc_start_ = 0.0;
  double arc_length_ = 0.0;
};

struct InitialSource {
  ScalarField2D f1;
  ScalarField2D f2;
  Box support;

  const Grid2D& grid() const { return f1.grid(); }
  static InitialSource zero(const Grid2D& grid, const Box& support);
  /// (f, -a f) restricted to the support box.
  static InitialSource pat(const ScalarField2D& f, const ScalarField2D& a, const Box& support);

  InitialSource& operator+=(const InitialSource& o);
  InitialSource& operator-=(const InitialSource& o);
  InitialSource& operator*=(double s);
};

InitialSource operator+(InitialSource a, const InitialSource& b);
InitialSource operator-(InitialSource a, const InitialSource& b);
InitialSource operator*(double s, InitialSource a);

}  // namespace pat
