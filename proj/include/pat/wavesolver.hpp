#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "pat/grid.hpp"
#include "pat/kernels.hpp"
#include "pat/media.hpp"
#include "pat/record.hpp"

namespace pat {

enum class EdgeKind { robin, neumann, dirichlet, pml, absorber };

/// Condition on one side of the computational grid. For pml/absorber the last
/// round(thickness/dx) nodes on that side form the layer and the outer node row is
/// held at zero; absorber only adds the damping sigma to the u_t coefficient.
struct EdgeCondition {
  EdgeKind kind = EdgeKind::neumann;
  std::vector<double> lambda;  // robin: one value per node along the edge
  double thickness = 0.0;      // pml/absorber layer width
  double sigma_max = 0.0;      // 0 selects 8 max(c) ln(10) / thickness
  int profile_order = 3;

  static EdgeCondition robin(std::vector<double> lambda);
  static EdgeCondition neumann();
  static EdgeCondition dirichlet();
  static EdgeCondition pml(double thickness, double sigma_max = 0.0);
  static EdgeCondition absorber(double thickness, double sigma_max = 0.0);

  bool is_layer() const { return kind == EdgeKind::pml || kind == EdgeKind::absorber; }
  /// Robin and Neumann edges are closed with the half-cell flux form.
  bool is_flux() const { return kind == EdgeKind::robin || kind == EdgeKind::neumann; }
};

struct BoundarySpec {
  std::array<EdgeCondition, 4> edges;  // indexed by Edge

  EdgeCondition& operator[](Edge e) { return edges[static_cast<std::size_t>(e)]; }
  const EdgeCondition& operator[](Edge e) const { return edges[static_cast<std::size_t>(e)]; }

  static BoundarySpec uniform(const EdgeCondition& c);

  /// Number of layer nodes beyond the physical boundary on edge e (0 for non-layers).
  int layer_nodes(Edge e, const Grid2D& grid) const;
  /// Nodes of the physical domain: the grid minus PML/absorber layers.
  IndexBox physical(const Grid2D& grid) const;
  /// Throws ConfigError on wrong lambda lengths, negative lambda, lambda inside a layer,
  /// or layers thinner than 4 nodes.
  void validate(const Grid2D& grid) const;

  /// Lambda at node (i, j) summed with the 2/h factors of the Robin edges it lies on.
  double lambda_flux(const Grid2D& grid, int i, int j) const;
  /// Sum of 2/h over the flux-closed edges that node (i, j) lies on.
  double flux_factor(const Grid2D& grid, int i, int j) const;

  /// Robin nodes with lambda > 0 (the observation set Gamma), counter-clockwise from the
  /// bottom-left corner, with arclength weights.
  std::vector<BoundaryNode> gamma_nodes(const Grid2D& grid) const;
};

/// Perimeter nodes of an index box, counter-clockwise from (i0, j0), trapezoid arclength
/// weights, lambda = 0.
std::vector<BoundaryNode> box_boundary_nodes(const Grid2D& grid, const IndexBox& box);

/// Builds Robin lambda vectors for every edge of `grid` from an absorption profile.
BoundarySpec robin_box(const Grid2D& grid, const BoundaryAbsorption& lambda);

struct SolverConfig {
  int order = 2;
  double courant = 0.3;
  double T = 1.0;
  double dt = 0.0;  // 0: largest step <= cfl_dt that divides T
};

/// courant * dx / (sqrt(2) max c). Requires dx == dy and courant in (0, 1].
double cfl_dt(const Grid2D& grid, const ScalarField2D& c, double courant);

/// Boundary data for a run, indexed by time step n = 0 .. n_steps - 1 (clamped past the end).
/// flux: prescribed normal derivative g with du/dnu = g - lambda u_t on the listed nodes,
/// which must lie on flux-closed edges. value: Dirichlet data on fixed nodes.
struct BoundaryDrive {
  enum class Kind { flux, value };
  Kind kind = Kind::flux;
  std::vector<std::size_t> nodes;  // storage indices into the solver grid
  std::size_t n_steps = 0;
  std::vector<double> samples;     // step-major

  double at(std::size_t step, std::size_t k) const {
    const std::size_t s = step < n_steps ? step : n_steps - 1;
    return samples[s * nodes.size() + k];
  }
};

struct WaveState {
  ScalarField2D u;       // u^n
  ScalarField2D u_prev;  // u^{n-1}
  std::vector<double> psi_x, psi_y;  // PML auxiliaries at n - 1/2 on x- and y-half-edges
  std::size_t step = 0;
  double t = 0.0;

  // Solver workspace, owned by the state so one solver can drive several runs.
  std::vector<double> extra, psi_avg_x, psi_avg_y;
  std::vector<std::size_t> drive_dirty;
};

/// Energy bookkeeping per step n: e_half[n] is the discrete energy between t_n and
/// t_{n+1}, dissipation[n] the damping rate sum w a c^-2 (u_t^n)^2 dxdy. The potential part
/// is the edge-difference form at order 2 and -<u^{n+1}, L u^n> at order 4.
struct EnergyHistory {
  std::vector<double> e_half;
  std::vector<double> dissipation;
};

/// Leapfrog solver for u_tt - c^2 Lap u + sign_a a u_t = 0 with per-edge closures.
class WaveSolver {
 public:
  WaveSolver(Medium medium, BoundarySpec bc, SolverConfig cfg, double sign_a = 1.0,
             kernels::Exec exec = kernels::Exec::parallel);

  const Grid2D& grid() const { return medium_.grid(); }
  const Medium& medium() const { return medium_; }
  const BoundarySpec& boundary() const { return bc_; }
  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }
  double T() const { return cfg_.T; }
  int order() const { return cfg_.order; }
  double sign_a() const { return sign_a_; }
  kernels::Exec exec() const { return exec_; }

  WaveState initial_state(const ScalarField2D& f1, const ScalarField2D& f2,
                          const BoundaryDrive* drive = nullptr) const;
  void step(WaveState& s, const BoundaryDrive* drive = nullptr) const;
  /// Centered u_t at the current level, taking one trial step.
  ScalarField2D velocity(const WaveState& s, const BoundaryDrive* drive = nullptr) const;

  /// Lap u with the solver's stencil plan (0 on fixed nodes).
  ScalarField2D apply_laplacian(const ScalarField2D& u) const;
  void check_drive(const BoundaryDrive& d) const;

 private:
  bool needs_extra(const BoundaryDrive* drive) const;
  void assemble_extra(WaveState& s, const BoundaryDrive* drive, std::size_t n) const;
  void update_psi(WaveState& s) const;
  void check_finite(const WaveState& s) const;

  Medium medium_;
  BoundarySpec bc_;
  SolverConfig cfg_;
  double sign_a_;
  kernels::Exec exec_;
  double dt_ = 0.0;
  std::size_t n_steps_ = 0;

  kernels::StencilPlan plan_;
  std::vector<double> c2_, inv_, beta_, a_total_, sxsy_, flux_c2_;
  // PML
  bool has_pml_ = false;
  std::vector<double> sx_node_, sy_node_, sx_half_, sy_half_;
  std::vector<int> psi_cols_x_;      // i with sigma_x(i + 1/2) > 0
  std::vector<int> psi_cols_y_;      // i with sigma_x(i) > 0
  std::vector<std::size_t> pml_nodes_;  // free nodes touching a PML auxiliary edge
};

struct RunOptions {
  std::vector<BoundaryNode> record_nodes;  // empty: no record
  const BoundaryDrive* drive = nullptr;
  std::optional<IndexBox> energy_region;   // track EnergyHistory over this box
  bool final_velocity = false;
  std::size_t snapshot_every = 0;
  std::function<void(const WaveState&)> on_snapshot;
};

struct RunResult {
  WaveState state;
  ScalarField2D velocity;  // filled when final_velocity is set
  std::optional<ObservationRecord> record;
  EnergyHistory history;
};

/// Full time loop from (f1, f2) at t = 0 to T.
RunResult run(const WaveSolver& solver, const ScalarField2D& f1, const ScalarField2D& f2,
              const RunOptions& opts = {});

// Energy diagnostics. Gradients use forward differences on grid edges and every sum is
// the trapezoid rule over `region` (half weight on its boundary rows/columns).

/// sum |grad u|^2 + c^-2 u_t^2 over the region.
double energy(const ScalarField2D& u, const ScalarField2D& ut, const ScalarField2D& c, const IndexBox& region);
double dirichlet_energy(const ScalarField2D& u, const IndexBox& region);
/// sum |grad u|^2 over the region's edges with a second field: the bilinear form grad u . grad v.
double dirichlet_form(const ScalarField2D& u, const ScalarField2D& v, const IndexBox& region);
/// Trapezoid node weights dx dy w_i w_j of the region, zero outside.
ScalarField2D trapezoid_weights(const Grid2D& grid, const IndexBox& region);

/// E_n + 2 dt sum_{k <= n} D_k for each n: the extended energy at t_{n+1/2}.
std::vector<double> extended_energy(const EnergyHistory& h, double dt);

/// Trapezoid value of sum_nodes weight * lambda * int (d_t h)^2 dt, with centered time
/// differences (one-sided at the ends). Needs at least 3 samples.
double boundary_flux(const ObservationRecord& h);

}  // namespace pat
