#include "pat/record.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pat/errors.hpp"

namespace pat {

ObservationRecord::ObservationRecord(std::vector<BoundaryNode> nodes, double dt, std::size_t n_steps)
    : nodes_(std::move(nodes)), dt_(dt), n_steps_(n_steps), samples_(nodes_.size() * n_steps, 0.0) {
  if (!(dt > 0.0)) throw ConfigError("record time step must be positive");
}

double ObservationRecord::max_abs() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

bool ObservationRecord::all_zero() const {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return v == 0.0; });
}

ObservationRecord ObservationRecord::resampled(double dt, std::size_t n_steps) const {
  ObservationRecord out(nodes_, dt, n_steps);
  if (n_steps_ == 0) return out;
  const std::size_t m = nodes_.size();
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double s = n * dt / dt_;
    if (s >= double(n_steps_ - 1)) {
      for (std::size_t k = 0; k < m; ++k) out.at(n, k) = at(n_steps_ - 1, k);
      continue;
    }
    const auto lo = static_cast<std::size_t>(s);
    const double w = s - double(lo);
    for (std::size_t k = 0; k < m; ++k) out.at(n, k) = (1.0 - w) * at(lo, k) + w * at(lo + 1, k);
  }
  return out;
}

double ObservationWindow::temporal(double t, double T) const {
  if (taper_fraction <= 0.0) return 1.0;
  const double t0 = (1.0 - taper_fraction) * T;
  if (t <= t0) return 1.0;
  if (t >= T) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (t - t0) / (T - t0)));
}

double ObservationWindow::spatial_weight(const BoundaryNode& n) const {
  if (!spatial || lambda0 <= 0.0) return 1.0;
  return std::min(1.0, n.lambda / lambda0);
}

ObservationRecord ObservationWindow::apply(const ObservationRecord& h) const {
  ObservationRecord out = h;
  const double T = h.duration();
  for (std::size_t n = 0; n < h.n_steps(); ++n) {
    const double wt = temporal(n * h.dt(), T);
    for (std::size_t k = 0; k < h.n_nodes(); ++k) out.at(n, k) *= wt * spatial_weight(h.nodes()[k]);
  }
  return out;
}

}  // namespace pat
