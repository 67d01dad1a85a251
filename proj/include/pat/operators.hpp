#pragma once

#include <vector>

#include "pat/grid.hpp"
#include "pat/media.hpp"
#include "pat/poisson.hpp"
#include "pat/record.hpp"
#include "pat/wavesolver.hpp"

namespace pat {

enum class Geometry { transparent, robin };
enum class TrKind { standard, dissipative };

struct ReconMode {
  Geometry geometry = Geometry::robin;
  TrKind tr_kind = TrKind::dissipative;
};

/// A forward model: medium and boundary closure on the computational grid, solver settings,
/// and the region Omega0 that holds the sources.
struct Problem {
  Medium medium;
  BoundarySpec bc;
  SolverConfig cfg;
  Box omega0;
  ObservationWindow window;
  CgOptions cg;
  kernels::Exec exec = kernels::Exec::parallel;

  const Grid2D& grid() const { return medium.grid(); }
  /// Nodes of the physical domain Omega (the grid minus absorbing layers).
  IndexBox omega() const { return bc.physical(grid()); }
  /// Robin: the Gamma nodes of bc. Transparent: the perimeter of Omega.
  std::vector<BoundaryNode> observation_nodes(Geometry geometry) const;
  /// Throws ConfigError if the boundary closure does not fit the geometry.
  void check(Geometry geometry) const;
};

/// h = Lambda_a f: Dirichlet trace of the forward solution on the observation nodes.
ObservationRecord observe(const InitialSource& f, const Problem& p, Geometry geometry);

/// (v, v_t) at t = 0 of the time-reversed system driven by the windowed record.
/// standard keeps +a in the backward equation, dissipative flips it to -a. Robin geometry
/// imposes d_nu v = -lambda d_t h on Gamma with final state (0, 0); transparent geometry
/// imposes v = h on the boundary of Omega with final state (harmonic extension of h(T), 0).
InitialSource time_reverse(const ObservationRecord& h, const ReconMode& mode, const Problem& p);

/// K_a f = f - Pi A_a Lambda_a f.
InitialSource error_op(const InitialSource& f, const ReconMode& mode, const Problem& p);

/// Pi_{Omega0} A_a h.
InitialSource project_reverse(const ObservationRecord& h, const ReconMode& mode, const Problem& p);

/// sqrt(sum |grad f1|^2 + c^-2 f2^2) over the nodes of the source support (trapezoid rule).
double h_norm(const InitialSource& f, const ScalarField2D& c);
double h_inner(const InitialSource& f, const InitialSource& g, const ScalarField2D& c);

}  // namespace pat
