#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "pat/operators.hpp"

namespace pat {

struct NeumannConfig {
  std::size_t n_terms = 20;
  double stop_tol = 0.0;  // stop once |K^m f0| / |f0| falls below this; 0 disables
  ReconMode mode{Geometry::robin, TrKind::dissipative};
  bool record_history = false;  // keep every partial sum's first component
};

struct Metrics {
  double rel_l2 = 0.0;
  double rel_linf = 0.0;
};

struct ReconReport {
  InitialSource reconstruction;
  std::vector<double> increment_norms;  // |K^m f0|_H, m = 0, 1, ...
  std::vector<double> ratios;           // increment_norms[m] / increment_norms[m - 1], m >= 1
  std::vector<ScalarField2D> history;   // f1 of the partial sums, when recorded
  bool stopped_early = false;
};

/// Pi_{Omega0} applied to the standard time reversal of h.
InitialSource back_projection(const ObservationRecord& h, Geometry geometry, const Problem& p);

/// f(0) = Pi A h, f(m) = f(m-1) + K^m f(0). Throws NonContractionError when three consecutive
/// increment norms grow.
ReconReport neumann_reconstruct(const ObservationRecord& h, const NeumannConfig& cfg, const Problem& p);

/// Relative L2 and Linf errors over the nodes of omega0. Throws DomainError for zero truth.
Metrics metrics(const ScalarField2D& reco, const ScalarField2D& truth, const Box& omega0);

/// CSV with header term,increment_norm,ratio,rel_l2,rel_linf. Metric columns are filled per
/// term from the history when present, else only on the last row, and left empty without truth.
void write_report_csv(const std::filesystem::path& path, const ReconReport& report,
                      const ScalarField2D* truth, const Box& omega0);

}  // namespace pat
