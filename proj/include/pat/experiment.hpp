#pragma once

#include <filesystem>
#include <optional>

#include "pat/config.hpp"
#include "pat/operators.hpp"
#include "pat/rays.hpp"
#include "pat/reconstruction.hpp"

namespace pat {

/// Everything derived from an ExperimentConfig: the computational grid (Omega plus absorbing
/// layers), medium, boundary closure, ray geometry and source region.
struct Experiment {
  ExperimentConfig cfg;
  Grid2D grid;
  IndexBox omega;  // nodes of Omega inside `grid`
  Box omega_box;
  Box omega0;
  SoundSpeedProfile profile = SoundSpeedProfile::constant(1.0);
  Medium medium;
  BoundaryAbsorption lambda;
  BoundarySpec bc;
  RayDomain ray_domain;
  double T = 0.0;  // final time; 0 until resolved

  static Experiment build(const ExperimentConfig& cfg);

  ReconMode mode() const { return {cfg.boundary.mode, cfg.recon.tr_kind}; }
  Problem problem(int order, kernels::Exec exec = kernels::Exec::parallel) const;
  /// The phantom source (smoothed, PAT pair if configured) restricted to Omega0.
  InitialSource truth() const;

  VisibilityOptions ray_options() const;
  /// Speed samples on Omega for fast marching.
  ScalarField2D omega_speed() const;
  VisibilityReport visibility() const;
  /// Sets T from the config, or to 1.2 T1 when unset. Throws NonContractionError if T1 is infinite.
  const VisibilityReport* resolve_T(std::optional<VisibilityReport>& cache);
};

struct SimulationOutput {
  ObservationRecord record;
  InitialSource truth;
  double T = 0.0;
  double seconds = 0.0;
};

struct ReconstructionOutput {
  InitialSource back_projection;
  ReconReport neumann;
  std::optional<Metrics> bp_metrics, neumann_metrics;
  double seconds = 0.0;
};

/// Forward data run with the data-order solver. Writes data.patr, truth.patf/.pgm and
/// snapshots under `out` when it is non-empty.
SimulationOutput simulate(Experiment& ex, const std::filesystem::path& out = {});

/// Back-projection and Neumann series with the reconstruction-order solver. Truth is only
/// read after both reconstructions are complete.
ReconstructionOutput reconstruct(const Experiment& ex, const ObservationRecord& h, const ScalarField2D* truth,
                                 const std::filesystem::path& out = {});

}  // namespace pat
