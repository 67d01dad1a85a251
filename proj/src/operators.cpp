#include "pat/operators.hpp"

#include <cmath>

#include "pat/errors.hpp"

namespace pat {

namespace {

constexpr Edge kEdges[] = {Edge::left, Edge::right, Edge::bottom, Edge::top};

// Record resampled to the solver step if needed, checked against the expected nodes.
ObservationRecord conform(const ObservationRecord& h, const std::vector<BoundaryNode>& nodes, double dt,
                          std::size_t n_steps) {
  if (h.n_nodes() != nodes.size()) throw ConfigError("record has " + std::to_string(h.n_nodes()) +
                                                     " nodes, the geometry has " + std::to_string(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (h.nodes()[k].i != nodes[k].i || h.nodes()[k].j != nodes[k].j)
      throw ConfigError("record node " + std::to_string(k) + " does not match the observation geometry");
  if (h.n_steps() == n_steps && std::abs(h.dt() - dt) <= 1e-12 * dt) return h;
  if (h.n_steps() < 2) throw ConfigError("record too short to resample");
  return h.resampled(dt, n_steps);
}

double sign_for(TrKind k) { return k == TrKind::dissipative ? 1.0 : -1.0; }

}  // namespace

void Problem::check(Geometry geometry) const {
  const Grid2D& g = grid();
  bc.validate(g);
  const IndexBox b = g.nodes_in(omega0);
  const IndexBox o = omega();
  if (b.empty() || b.i0 <= o.i0 || b.j0 <= o.j0 || b.i1 >= o.i1 || b.j1 >= o.j1)
    throw ConfigError("Omega0 must lie strictly inside Omega");
  if (geometry == Geometry::transparent) {
    for (Edge e : kEdges)
      if (bc[e].kind != EdgeKind::pml) throw ConfigError("transparent geometry needs PML on every edge");
  } else {
    if (bc.gamma_nodes(g).empty()) throw ConfigError("robin geometry needs lambda > 0 on some boundary nodes");
  }
}

std::vector<BoundaryNode> Problem::observation_nodes(Geometry geometry) const {
  if (geometry == Geometry::transparent) return box_boundary_nodes(grid(), omega());
  return bc.gamma_nodes(grid());
}

ObservationRecord observe(const InitialSource& f, const Problem& p, Geometry geometry) {
  p.check(geometry);
  const WaveSolver solver(p.medium, p.bc, p.cfg, 1.0, p.exec);
  RunOptions opts;
  opts.record_nodes = p.observation_nodes(geometry);
  return std::move(*run(solver, f.f1, f.f2, opts).record);
}

InitialSource time_reverse(const ObservationRecord& h_in, const ReconMode& mode, const Problem& p) {
  p.check(mode.geometry);
  const Grid2D& g = p.grid();
  const auto nodes = p.observation_nodes(mode.geometry);
  const double sign_a = sign_for(mode.tr_kind);
  const IndexBox omega = p.omega();
  const Box omega_box{g.x(omega.i0), g.x(omega.i1), g.y(omega.j0), g.y(omega.j1)};

  // The backward problem is solved forward in s = T - t.
  if (mode.geometry == Geometry::robin) {
    BoundarySpec bc = p.bc;
    for (Edge e : kEdges)
      if (bc[e].kind == EdgeKind::robin) std::fill(bc[e].lambda.begin(), bc[e].lambda.end(), 0.0);
    const WaveSolver solver(p.medium, bc, p.cfg, sign_a, p.exec);
    const std::size_t N = solver.n_steps();
    const ObservationRecord h = p.window.apply(conform(h_in, nodes, solver.dt(), N + 1));

    // d_nu v = -lambda d_t h  <=>  d_nu v = +lambda d_s h(T - s)
    BoundaryDrive drive;
    drive.kind = BoundaryDrive::Kind::flux;
    drive.n_steps = N + 1;
    const std::size_t m = nodes.size();
    for (const auto& n : nodes) drive.nodes.push_back(g.index(n.i, n.j));
    drive.samples.assign(drive.n_steps * m, 0.0);
    const double dt = solver.dt();
    auto hs = [&](std::size_t s, std::size_t k) { return h.at(N - s, k); };
    for (std::size_t s = 0; s <= N; ++s) {
      for (std::size_t k = 0; k < m; ++k) {
        double d;
        if (s == 0)
          d = (hs(1, k) - hs(0, k)) / dt;
        else if (s == N)
          d = (hs(N, k) - hs(N - 1, k)) / dt;
        else
          d = (hs(s + 1, k) - hs(s - 1, k)) / (2.0 * dt);
        drive.samples[s * m + k] = nodes[k].lambda * d;
      }
    }
    RunOptions opts;
    opts.drive = &drive;
    opts.final_velocity = true;
    const ScalarField2D zero(g);
    auto r = run(solver, zero, zero, opts);
    r.velocity *= -1.0;
    return {std::move(r.state.u), std::move(r.velocity), omega_box};
  }

  // Transparent: Dirichlet drive on the perimeter of Omega, solved on Omega alone.
  const Medium m_omega = p.medium.restricted(omega);
  const BoundarySpec bc = BoundarySpec::uniform(EdgeCondition::dirichlet());
  const WaveSolver solver(m_omega, bc, p.cfg, sign_a, p.exec);
  const Grid2D& go = solver.grid();
  const std::size_t N = solver.n_steps();
  const ObservationRecord h = p.window.apply(conform(h_in, nodes, solver.dt(), N + 1));

  BoundaryDrive drive;
  drive.kind = BoundaryDrive::Kind::value;
  drive.n_steps = N + 1;
  const std::size_t m = nodes.size();
  for (const auto& n : nodes) drive.nodes.push_back(go.index(n.i - omega.i0, n.j - omega.j0));
  drive.samples.resize(drive.n_steps * m);
  for (std::size_t s = 0; s <= N; ++s)
    for (std::size_t k = 0; k < m; ++k) drive.samples[s * m + k] = h.at(N - s, k);

  ScalarField2D final_u(go);
  for (std::size_t k = 0; k < m; ++k) final_u[drive.nodes[k]] = h.at(N, k);
  final_u = harmonic_extension(final_u, p.cg);

  RunOptions opts;
  opts.drive = &drive;
  opts.final_velocity = true;
  auto r = run(solver, final_u, ScalarField2D(go), opts);
  r.velocity *= -1.0;
  InitialSource out{ScalarField2D(g), ScalarField2D(g), omega_box};
  out.f1.embed(r.state.u, omega.i0, omega.j0);
  out.f2.embed(r.velocity, omega.i0, omega.j0);
  return out;
}

InitialSource project_reverse(const ObservationRecord& h, const ReconMode& mode, const Problem& p) {
  return project_omega0(time_reverse(h, mode, p), p.omega0, p.cg);
}

InitialSource error_op(const InitialSource& f, const ReconMode& mode, const Problem& p) {
  InitialSource back = project_reverse(observe(f, p, mode.geometry), mode, p);
  InitialSource out = f;
  out.f1 -= back.f1;
  out.f2 -= back.f2;
  return out;
}

double h_inner(const InitialSource& f, const InitialSource& g, const ScalarField2D& c) {
  const Grid2D& grid = f.grid();
  if (!g.grid().same_as(grid) || !c.grid().same_as(grid)) throw ConfigError("h_inner: fields on different grids");
  const IndexBox b = grid.nodes_in(f.support);
  const ScalarField2D w = trapezoid_weights(grid, b);
  double s = dirichlet_form(f.f1, g.f1, b);
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) s += w(i, j) * f.f2(i, j) * g.f2(i, j) / (c(i, j) * c(i, j));
  return s;
}

double h_norm(const InitialSource& f, const ScalarField2D& c) { return std::sqrt(h_inner(f, f, c)); }

}  // namespace pat
