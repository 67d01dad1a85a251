#pragma once

#include <cstddef>

#include "pat/grid.hpp"
#include "pat/kernels.hpp"
#include "pat/media.hpp"

namespace pat {

struct CgOptions {
  double rel_tol = 1e-8;
  std::size_t max_iter = 0;  // 0: 50 (nx + ny) + 1000
  kernels::Exec exec = kernels::Exec::parallel;
};

struct CgReport {
  std::size_t iterations = 0;
  double rel_residual = 0.0;
};

/// Solves the 5-point problem Lap_h u = rhs at interior nodes of u's grid, with u held at
/// its given values on the grid perimeter. Conjugate gradients on the SPD operator -Lap_h;
/// throws ConvergenceError if the relative residual does not reach rel_tol.
CgReport solve_dirichlet(ScalarField2D& u, const ScalarField2D& rhs, const CgOptions& opt = {});

/// Discrete harmonic function with the perimeter values of `boundary` (interior ignored).
ScalarField2D harmonic_extension(const ScalarField2D& boundary, const CgOptions& opt = {});

/// Pi_{Omega0}: first component solves Lap_h g = Lap_h f1 on the nodes of omega0 with g = 0
/// on its perimeter, second component is f2 times the indicator of omega0.
InitialSource project_omega0(const InitialSource& f, const Box& omega0, const CgOptions& opt = {});

}  // namespace pat
