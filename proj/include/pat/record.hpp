#pragma once

#include <cstddef>
#include <vector>

#include "pat/grid.hpp"

namespace pat {

/// One detector node of the observation set.
struct BoundaryNode {
  int i = 0, j = 0;       // grid indices in the grid the record was taken on
  double x = 0.0, y = 0.0;
  double weight = 0.0;    // arclength quadrature weight
  double lambda = 0.0;    // boundary absorption at the node
};

/// Time series of the wave trace on the observation nodes, step-major: sample(n, k) is
/// the value at node k at time n * dt, for n = 0 .. n_steps - 1.
class ObservationRecord {
 public:
  ObservationRecord() = default;
  ObservationRecord(std::vector<BoundaryNode> nodes, double dt, std::size_t n_steps);

  const std::vector<BoundaryNode>& nodes() const { return nodes_; }
  std::size_t n_nodes() const { return nodes_.size(); }
  std::size_t n_steps() const { return n_steps_; }
  double dt() const { return dt_; }
  double duration() const { return n_steps_ == 0 ? 0.0 : dt_ * double(n_steps_ - 1); }

  double& at(std::size_t step, std::size_t node) { return samples_[step * nodes_.size() + node]; }
  double at(std::size_t step, std::size_t node) const { return samples_[step * nodes_.size() + node]; }
  std::vector<double>& samples() { return samples_; }
  const std::vector<double>& samples() const { return samples_; }

  double max_abs() const;
  bool all_zero() const;

  /// Same geometry, samples resampled (linear in time) onto a new step.
  ObservationRecord resampled(double dt, std::size_t n_steps) const;

 private:
  std::vector<BoundaryNode> nodes_;
  double dt_ = 0.0;
  std::size_t n_steps_ = 0;
  std::vector<double> samples_;
};

/// Observation cutoff chi(t, x) = temporal(t) * spatial(x). The temporal factor is 1 up to
/// (1 - taper_fraction) T and rolls to 0 at T with a half cosine; the spatial factor is
/// min(1, lambda / lambda0) when `spatial` is set, else 1.
struct ObservationWindow {
  double taper_fraction = 0.05;
  bool spatial = false;
  double lambda0 = 0.5;

  double temporal(double t, double T) const;
  double spatial_weight(const BoundaryNode& n) const;
  ObservationRecord apply(const ObservationRecord& h) const;
};

}  // namespace pat
