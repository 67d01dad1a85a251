#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pat/grid.hpp"
#include "pat/media.hpp"
#include "pat/operators.hpp"

namespace pat {

enum class SpeedKind { constant, variable };
enum class DampingSetting { none, a1, a2 };
enum class PhantomKind { zero, shepp_logan };
enum class OpenKind { pml, absorber };

struct GridSettings {
  int n = 201;              // nodes per side of Omega
  double half_width = 1.0;  // Omega = [-h, h]^2
  double dx() const { return 2.0 * half_width / (n - 1); }
  bool operator==(const GridSettings&) const = default;
};

struct DomainSettings {
  double omega0_half_width = 0.9667;
  bool operator==(const DomainSettings&) const = default;
};

struct MediumSettings {
  SpeedKind speed = SpeedKind::variable;
  double speed_value = 1.0;  // constant speed
  DampingSetting damping = DampingSetting::a1;
  double collar = 0.0333;
  double transition = 0.1;
  bool operator==(const MediumSettings&) const = default;
};

struct BoundarySettings {
  Geometry mode = Geometry::robin;
  std::vector<Edge> gamma_edges{Edge::bottom, Edge::right, Edge::top};
  std::vector<Edge> open_edges{Edge::left};  // robin mode: edges closed by a layer
  double lambda = 1.0;
  double taper = 0.1;
  double lambda0 = 0.5;
  OpenKind open_kind = OpenKind::pml;
  double pml_delta = 0.1;
  bool operator==(const BoundarySettings&) const = default;
};

struct SourceSettings {
  PhantomKind phantom = PhantomKind::shepp_logan;
  std::vector<Point> centers{{0.0, 0.0}};
  double scale = 0.9;
  double sigma = 0.0;  // 0: 1.5 dx
  bool pat_mode = true;
  bool operator==(const SourceSettings& o) const;
};

struct SolverSettings {
  double courant = 0.3;
  double T = 0.0;  // 0: 1.2 T1 from the ray sweep
  int data_order = 4;
  int recon_order = 2;
  bool operator==(const SolverSettings&) const = default;
};

struct ReconSettings {
  TrKind tr_kind = TrKind::dissipative;
  int n_terms = 20;
  double stop_tol = 0.0;
  double window_taper = 0.05;
  bool window_spatial = false;
  bool history = false;
  bool operator==(const ReconSettings&) const = default;
};

struct RaySettings {
  int seeds = 64;
  int angles = 128;
  double step = 0.0;  // 0: dx / 2
  double horizon = 6.0;
  bool operator==(const RaySettings&) const = default;
};

struct OutputSettings {
  std::string dir = "out";
  int dump_every = 0;
  double window_lo = -0.2;
  double window_hi = 1.0;
  bool operator==(const OutputSettings&) const = default;
};

struct ExperimentConfig {
  GridSettings grid;
  DomainSettings domain;
  MediumSettings medium;
  BoundarySettings boundary;
  SourceSettings source;
  SolverSettings solver;
  ReconSettings recon;
  RaySettings rays;
  OutputSettings output;

  bool operator==(const ExperimentConfig&) const = default;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// INI text: [section] headers and key = value lines; '#' and ';' start comments.
/// Unknown sections or keys are errors; missing keys keep their defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

std::string to_string(Edge e);
Edge edge_from_string(const std::string& s);

}  // namespace pat
