#include "pat/poisson.hpp"

#include <cmath>
#include <string>

#include "pat/errors.hpp"

namespace pat {

using kernels::Exec;

CgReport solve_dirichlet(ScalarField2D& u, const ScalarField2D& rhs, const CgOptions& opt) {
  const Grid2D& g = u.grid();
  if (!rhs.grid().same_as(g)) throw ConfigError("Poisson right-hand side is on a different grid");
  const auto plan = kernels::dirichlet_box_plan(g.nx, g.ny, g.dx, g.dy);
  const std::size_t n = g.size();
  const Exec ex = opt.exec;

  // Unknowns live on the interior; b = -rhs + Lap_h(boundary part), zero on the perimeter.
  std::vector<double> b(n, 0.0), r(n), p(n), ap(n), w(n, 0.0);
  {
    std::vector<double> ub(n, 0.0);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) ub[g.index(i, j)] = u(i, j);
    std::vector<double> lub(n);
    kernels::laplacian(plan, ub.data(), lub.data(), ex);
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) {
        const std::size_t q = g.index(i, j);
        b[q] = lub[q] - rhs[q];
      }
  }
  const double bnorm = std::sqrt(kernels::dot(b, b, ex));
  CgReport rep;
  auto finish = [&]() {
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) u(i, j) = w[g.index(i, j)];
  };
  if (bnorm == 0.0) {
    finish();
    return rep;
  }
  const std::size_t max_iter = opt.max_iter ? opt.max_iter : 50 * static_cast<std::size_t>(g.nx + g.ny) + 1000;

  // -Lap_h is the SPD operator.
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    kernels::laplacian(plan, x.data(), y.data(), ex);
    for (double& v : y) v = -v;
  };
  r = b;
  p = r;
  double rr = kernels::dot(r, r, ex);
  const double target = opt.rel_tol * bnorm;
  while (std::sqrt(rr) > target) {
    if (rep.iterations >= max_iter)
      throw ConvergenceError("Poisson CG did not converge in " + std::to_string(max_iter) + " iterations",
                             std::sqrt(rr) / bnorm);
    apply(p, ap);
    const double pap = kernels::dot(p, ap, ex);
    if (!(pap > 0.0)) throw ConvergenceError("Poisson CG breakdown", std::sqrt(rr) / bnorm);
    const double alpha = rr / pap;
    kernels::axpy(alpha, p, w, ex);
    kernels::axpy(-alpha, ap, r, ex);
    const double rr_new = kernels::dot(r, r, ex);
    kernels::xpby(r, rr_new / rr, p, ex);
    rr = rr_new;
    ++rep.iterations;
  }
  rep.rel_residual = std::sqrt(rr) / bnorm;
  finish();
  return rep;
}

ScalarField2D harmonic_extension(const ScalarField2D& boundary, const CgOptions& opt) {
  for (double v : boundary.values())
    if (!std::isfinite(v)) throw NumericalError("harmonic extension: non-finite boundary data");
  ScalarField2D u = boundary;
  solve_dirichlet(u, ScalarField2D(boundary.grid()), opt);
  return u;
}

InitialSource project_omega0(const InitialSource& f, const Box& omega0, const CgOptions& opt) {
  const Grid2D& g = f.grid();
  const IndexBox b = g.nodes_in(omega0);
  if (b.i0 < 1 || b.j0 < 1 || b.i1 > g.nx - 2 || b.j1 > g.ny - 2 || b.nx() < 3 || b.ny() < 3)
    throw ConfigError("Omega0 must lie strictly inside the grid");

  // 5-point Laplacian of f1 at the interior nodes of omega0.
  const ScalarField2D f1 = f.f1.extract({b.i0 - 1, b.i1 + 1, b.j0 - 1, b.j1 + 1});
  ScalarField2D lap(f1.grid());
  kernels::laplacian(kernels::dirichlet_box_plan(f1.grid().nx, f1.grid().ny, g.dx, g.dy), f1.data(), lap.data(),
                     opt.exec);
  const ScalarField2D rhs = lap.extract({1, b.nx(), 1, b.ny()});

  ScalarField2D sol(rhs.grid());  // zero perimeter
  solve_dirichlet(sol, rhs, opt);

  InitialSource out{ScalarField2D(g), restrict_to(f.f2, b), omega0};
  out.f1.embed(sol, b.i0, b.j0);
  return out;
}

}  // namespace pat
