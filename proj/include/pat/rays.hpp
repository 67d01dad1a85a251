#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "pat/grid.hpp"
#include "pat/media.hpp"

namespace pat {

// Principal symbols at a Robin boundary point, for tau < 0 and c |eta| < -tau.
/// r = (s + tau lambda) / (s - tau lambda), s = sqrt(c^-2 tau^2 - |eta|^2).
double reflection_coefficient(double c, double lambda, double tau, double eta_norm);
/// p = 1 + r.
double symbol_p(double c, double lambda, double tau, double eta_norm);
/// q = -tau lambda / (s - tau lambda).
double symbol_q(double c, double lambda, double tau, double eta_norm);

/// Geometry seen by rays: the rectangle Omega, which edges reflect (the rest are open and let
/// rays escape), and the absorption profile lambda that defines Gamma and the reflection amplitudes.
struct RayDomain {
  Box omega;
  std::array<bool, 4> reflecting{true, true, true, true};  // indexed by Edge
  BoundaryAbsorption lambda;
};

/// Position, covector (normalised so c(x)|xi| = 1) and elapsed time.
struct RayState {
  Point x;
  Point xi;
  double t = 0.0;
};

enum class RayEventKind { reflection, escape, corner, grazing };

struct RayEvent {
  RayEventKind kind = RayEventKind::reflection;
  double t = 0.0;
  Point x;
  Edge edge = Edge::left;
  Point xi_in, xi_out;
  double lambda = 0.0;
  double r = 1.0;  // reflection coefficient applied at this event
};

struct RaySample {
  double t, x, y, amplitude;
};

struct BrokenRay {
  std::vector<RaySample> path;
  std::vector<RayEvent> events;
  RayState end;
  double amplitude = 1.0;
  std::optional<double> hit_gamma;
  bool escaped = false;
  bool corner = false;
  bool grazing = false;
};

struct TraceOptions {
  double t_max = 1.0;
  double step = 1e-3;
  double dx = 0.0;           // grid spacing the ray must resolve; step <= dx / 2 when positive
  bool stop_at_gamma = false;
  bool store_path = true;
};

/// Integrates x' = c^2 xi, xi' = -|xi| grad c with RK4 (xi renormalised every step), applying
/// the mirror law and amplitude factor r at reflecting edges. Stops at t_max, on escape, at a
/// corner or at grazing incidence, or on the first Gamma hit when requested.
BrokenRay trace(const RayState& start, const SoundSpeedProfile& c, const RayDomain& dom, const TraceOptions& opt);

/// Unit-speed initial state at x in direction angle theta.
RayState ray_start(Point x, double theta, const SoundSpeedProfile& c);

/// First-order fast marching solution of |grad d| = 1/c on `grid`, d = 0 on the nodes of
/// grid's boundary where lambda > 0.
ScalarField2D distance_to_gamma(const Grid2D& grid, const ScalarField2D& c, const BoundaryAbsorption& lambda);
double dist_to_gamma(Point x, const ScalarField2D& distance);

struct VisibilityOptions {
  int seeds = 64;    // per axis, over the closed Omega0
  int angles = 128;  // in [0, pi)
  double step = 5e-3;
  double horizon = 6.0;
  double dx = 0.0;
};

struct Offender {
  Point x;
  double theta = 0.0;
  double t_plus = 0.0, t_minus = 0.0;  // first Gamma hits, +inf when none
  const char* reason = "";
};

struct VisibilityReport {
  double T0 = 0.0;
  double T1 = 0.0;  // +inf when some ray pair never meets Gamma
  double T1_reached = 0.0;  // same maximum over the pairs that do meet Gamma
  Point worst_x;
  double worst_theta = 0.0;
  std::size_t rays = 0;
  std::size_t grazing_excluded = 0;
  std::size_t corner_hits = 0;
  std::vector<Offender> offenders;

  bool visible(double T) const { return offenders.empty() && T > T1; }
};

/// T0 from fast marching over the grid nodes of Omega0; T1 from the broken-ray sweep.
VisibilityReport visibility_times(const Box& omega0, const RayDomain& dom, const SoundSpeedProfile& c,
                                  const ScalarField2D& c_grid, const VisibilityOptions& opt);

void write_ray_csv(const std::filesystem::path& path, const BrokenRay& ray);
void write_offenders_csv(const std::filesystem::path& path, const VisibilityReport& rep);

}  // namespace pat
