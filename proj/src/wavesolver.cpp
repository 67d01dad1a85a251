#include "pat/wavesolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pat/errors.hpp"

namespace pat {

namespace {

using kernels::Exec;
using kernels::Ghost;
using kernels::StencilKind;

constexpr std::size_t kFiniteCheckEvery = 64;

std::size_t edge_length(Edge e, const Grid2D& g) {
  return static_cast<std::size_t>(e == Edge::left || e == Edge::right ? g.ny : g.nx);
}

double edge_spacing(Edge e, const Grid2D& g) { return e == Edge::left || e == Edge::right ? g.dx : g.dy; }

// Edges that node (i, j) lies on, with its position along each.
template <class F>
void for_edges_at(const Grid2D& g, int i, int j, F&& f) {
  if (i == 0) f(Edge::left, j);
  if (i == g.nx - 1) f(Edge::right, j);
  if (j == 0) f(Edge::bottom, i);
  if (j == g.ny - 1) f(Edge::top, i);
}

// Layer damping along one axis: sigma at nodes and at half points m + 1/2.
struct AxisSigma {
  std::vector<double> node, half;
};

AxisSigma axis_sigma(int n, double h, const EdgeCondition& lo, int lo_nodes, const EdgeCondition& hi, int hi_nodes,
                     double c_max, bool want_pml) {
  AxisSigma s{std::vector<double>(static_cast<std::size_t>(n), 0.0), std::vector<double>(static_cast<std::size_t>(n - 1), 0.0)};
  auto profile = [&](const EdgeCondition& e, int nodes, double xi) {
    if (xi <= 0.0) return 0.0;
    const double delta = nodes * h;
    const double smax = e.sigma_max > 0.0 ? e.sigma_max : 8.0 * c_max * std::numbers::ln10 / delta;
    return smax * std::pow(xi / delta, e.profile_order);
  };
  auto wanted = [&](const EdgeCondition& e) {
    return e.is_layer() && ((e.kind == EdgeKind::pml) == want_pml);
  };
  for (int m = 0; m < n; ++m) {
    double v = 0.0;
    if (wanted(lo)) v += profile(lo, lo_nodes, (lo_nodes - m) * h);
    if (wanted(hi)) v += profile(hi, hi_nodes, (m - (n - 1 - hi_nodes)) * h);
    s.node[static_cast<std::size_t>(m)] = v;
  }
  for (int m = 0; m + 1 < n; ++m) {
    double v = 0.0;
    if (wanted(lo)) v += profile(lo, lo_nodes, (lo_nodes - m - 0.5) * h);
    if (wanted(hi)) v += profile(hi, hi_nodes, (m + 0.5 - (n - 1 - hi_nodes)) * h);
    s.half[static_cast<std::size_t>(m)] = v;
  }
  return s;
}

kernels::AxisPlan axis_plan(int n, double h, const EdgeCondition& lo, int lo_nodes, const EdgeCondition& hi,
                            int hi_nodes, int order) {
  kernels::AxisPlan a;
  a.h = h;
  a.kind.assign(static_cast<std::size_t>(n), StencilKind::o2);
  a.kind.front() = lo.is_flux() ? StencilKind::flux_lo : StencilKind::fixed;
  a.kind.back() = hi.is_flux() ? StencilKind::flux_hi : StencilKind::fixed;
  if (order != 4) return a;

  auto ghost = [](const EdgeCondition& e) {
    if (e.kind == EdgeKind::neumann) return Ghost::even;
    if (e.kind == EdgeKind::dirichlet) return Ghost::odd;
    return Ghost::none;
  };
  a.lo_ghost = ghost(lo);
  a.hi_ghost = ghost(hi);
  for (int m = 0; m < n; ++m) {
    auto& k = a.kind[static_cast<std::size_t>(m)];
    if (k == StencilKind::fixed) continue;
    // Robin and layer regions keep the second-order flux-compatible stencil.
    if (m < lo_nodes || m > n - 1 - hi_nodes) continue;
    const bool lo_ok = m - 2 >= 0 || a.lo_ghost != Ghost::none;
    const bool hi_ok = m + 2 <= n - 1 || a.hi_ghost != Ghost::none;
    if (lo_ok && hi_ok) k = StencilKind::o4;
  }
  return a;
}

}  // namespace

EdgeCondition EdgeCondition::robin(std::vector<double> lambda) {
  EdgeCondition e;
  e.kind = EdgeKind::robin;
  e.lambda = std::move(lambda);
  return e;
}

EdgeCondition EdgeCondition::neumann() { return {}; }

EdgeCondition EdgeCondition::dirichlet() {
  EdgeCondition e;
  e.kind = EdgeKind::dirichlet;
  return e;
}

EdgeCondition EdgeCondition::pml(double thickness, double sigma_max) {
  EdgeCondition e;
  e.kind = EdgeKind::pml;
  e.thickness = thickness;
  e.sigma_max = sigma_max;
  return e;
}

EdgeCondition EdgeCondition::absorber(double thickness, double sigma_max) {
  EdgeCondition e = pml(thickness, sigma_max);
  e.kind = EdgeKind::absorber;
  return e;
}

BoundarySpec BoundarySpec::uniform(const EdgeCondition& c) { return {{c, c, c, c}}; }

int BoundarySpec::layer_nodes(Edge e, const Grid2D& grid) const {
  const auto& c = (*this)[e];
  if (!c.is_layer()) return 0;
  return static_cast<int>(std::lround(c.thickness / edge_spacing(e, grid)));
}

IndexBox BoundarySpec::physical(const Grid2D& g) const {
  return {layer_nodes(Edge::left, g), g.nx - 1 - layer_nodes(Edge::right, g), layer_nodes(Edge::bottom, g),
          g.ny - 1 - layer_nodes(Edge::top, g)};
}

void BoundarySpec::validate(const Grid2D& g) const {
  static const char* names[] = {"left", "right", "bottom", "top"};
  const IndexBox phys = physical(g);
  if (phys.nx() < 3 || phys.ny() < 3) throw ConfigError("absorbing layers leave no interior");
  for (Edge e : {Edge::left, Edge::right, Edge::bottom, Edge::top}) {
    const auto& c = (*this)[e];
    const std::string name = names[static_cast<int>(e)];
    if (c.is_layer()) {
      if (!(c.thickness > 0.0)) throw ConfigError(name + " layer thickness must be positive");
      if (layer_nodes(e, g) < 4) throw ConfigError(name + " layer is thinner than 4 nodes");
      if (c.sigma_max < 0.0) throw ConfigError(name + " layer sigma_max must be nonnegative");
    }
    if (c.kind != EdgeKind::robin) continue;
    if (c.lambda.size() != edge_length(e, g))
      throw ConfigError(name + " edge lambda has " + std::to_string(c.lambda.size()) + " values, expected " +
                        std::to_string(edge_length(e, g)));
    const bool vertical = e == Edge::left || e == Edge::right;
    for (std::size_t k = 0; k < c.lambda.size(); ++k) {
      const double l = c.lambda[k];
      if (!std::isfinite(l) || l < 0.0) throw ConfigError(name + " edge lambda must be finite and >= 0");
      const int m = static_cast<int>(k);
      const bool inside = vertical ? (m >= phys.j0 && m <= phys.j1) : (m >= phys.i0 && m <= phys.i1);
      if (l > 0.0 && !inside) throw ConfigError(name + " edge lambda must vanish inside absorbing layers");
    }
  }
}

double BoundarySpec::lambda_flux(const Grid2D& g, int i, int j) const {
  double s = 0.0;
  for_edges_at(g, i, j, [&](Edge e, int pos) {
    const auto& c = (*this)[e];
    if (c.kind == EdgeKind::robin) s += c.lambda[static_cast<std::size_t>(pos)] * 2.0 / edge_spacing(e, g);
  });
  return s;
}

double BoundarySpec::flux_factor(const Grid2D& g, int i, int j) const {
  double s = 0.0;
  for_edges_at(g, i, j, [&](Edge e, int) {
    if ((*this)[e].is_flux()) s += 2.0 / edge_spacing(e, g);
  });
  return s;
}

namespace {

// Counter-clockwise walk over the perimeter of a box, each node once.
template <class F>
void walk_perimeter(const IndexBox& b, F&& f) {
  for (int i = b.i0; i <= b.i1; ++i) f(i, b.j0);
  for (int j = b.j0 + 1; j <= b.j1; ++j) f(b.i1, j);
  for (int i = b.i1 - 1; i >= b.i0; --i) f(i, b.j1);
  for (int j = b.j1 - 1; j > b.j0; --j) f(b.i0, j);
}

double trapezoid(int m, int lo, int hi) { return (m == lo || m == hi) ? 0.5 : 1.0; }

}  // namespace

std::vector<BoundaryNode> BoundarySpec::gamma_nodes(const Grid2D& g) const {
  std::vector<BoundaryNode> out;
  walk_perimeter(g.all(), [&](int i, int j) {
    double lam = 0.0, weight = 0.0;
    for_edges_at(g, i, j, [&](Edge e, int pos) {
      const auto& c = (*this)[e];
      if (c.kind != EdgeKind::robin) return;
      lam = std::max(lam, c.lambda[static_cast<std::size_t>(pos)]);
      const int last = static_cast<int>(edge_length(e, g)) - 1;
      weight += trapezoid(pos, 0, last) * (e == Edge::left || e == Edge::right ? g.dy : g.dx);
    });
    if (lam > 0.0) out.push_back({i, j, g.x(i), g.y(j), weight, lam});
  });
  return out;
}

std::vector<BoundaryNode> box_boundary_nodes(const Grid2D& g, const IndexBox& b) {
  std::vector<BoundaryNode> out;
  walk_perimeter(b, [&](int i, int j) {
    double w = 0.0;
    if (j == b.j0 || j == b.j1) w += trapezoid(i, b.i0, b.i1) * g.dx;
    if (i == b.i0 || i == b.i1) w += trapezoid(j, b.j0, b.j1) * g.dy;
    out.push_back({i, j, g.x(i), g.y(j), w, 0.0});
  });
  return out;
}

BoundarySpec robin_box(const Grid2D& g, const BoundaryAbsorption& lambda) {
  BoundarySpec bc;
  for (Edge e : {Edge::left, Edge::right, Edge::bottom, Edge::top}) {
    std::vector<double> l(edge_length(e, g));
    for (std::size_t k = 0; k < l.size(); ++k) {
      const int m = static_cast<int>(k);
      Point p;
      switch (e) {
        case Edge::left: p = g.node(0, m); break;
        case Edge::right: p = g.node(g.nx - 1, m); break;
        case Edge::bottom: p = g.node(m, 0); break;
        case Edge::top: p = g.node(m, g.ny - 1); break;
      }
      l[k] = lambda(p);
    }
    bc[e] = EdgeCondition::robin(std::move(l));
  }
  return bc;
}

double cfl_dt(const Grid2D& grid, const ScalarField2D& c, double courant) {
  if (!(courant > 0.0 && courant <= 1.0)) throw ConfigError("courant factor must lie in (0, 1]");
  if (std::abs(grid.dx - grid.dy) > 1e-12 * grid.dx) throw ConfigError("anisotropic grids (dx != dy) are not supported");
  const double cmax = c.max();
  if (!(cmax > 0.0)) throw ConfigError("sound speed must be positive");
  return courant * grid.dx / (std::numbers::sqrt2 * cmax);
}

WaveSolver::WaveSolver(Medium medium, BoundarySpec bc, SolverConfig cfg, double sign_a, Exec exec)
    : medium_(std::move(medium)), bc_(std::move(bc)), cfg_(cfg), sign_a_(sign_a), exec_(exec) {
  medium_.validate();
  const Grid2D& g = grid();
  bc_.validate(g);
  if (cfg_.order != 2 && cfg_.order != 4) throw ConfigError("solver order must be 2 or 4");
  if (!(cfg_.T > 0.0)) throw ConfigError("final time T must be positive");
  if (sign_a_ != 1.0 && sign_a_ != -1.0) throw ConfigError("sign_a must be +1 or -1");
  // The fourth-order stencil's spectral radius is 4/3 that of the 5-point one.
  if (cfg_.order == 4 && cfg_.courant > std::sqrt(0.75)) throw ConfigError("courant factor too large for order 4");

  const double dt_max = cfl_dt(g, medium_.c, cfg_.courant);
  if (cfg_.dt > 0.0) {
    if (cfg_.dt > dt_max * (1.0 + 1e-12))
      throw ConfigError("time step " + std::to_string(cfg_.dt) + " exceeds the CFL limit " + std::to_string(dt_max));
    dt_ = cfg_.dt;
    n_steps_ = static_cast<std::size_t>(std::ceil(cfg_.T / dt_ - 1e-9));
  } else {
    n_steps_ = static_cast<std::size_t>(std::ceil(cfg_.T / dt_max - 1e-9));
    dt_ = cfg_.T / static_cast<double>(n_steps_);
  }

  const int L = bc_.layer_nodes(Edge::left, g), R = bc_.layer_nodes(Edge::right, g);
  const int B = bc_.layer_nodes(Edge::bottom, g), Tn = bc_.layer_nodes(Edge::top, g);
  plan_.x = axis_plan(g.nx, g.dx, bc_[Edge::left], L, bc_[Edge::right], R, cfg_.order);
  plan_.y = axis_plan(g.ny, g.dy, bc_[Edge::bottom], B, bc_[Edge::top], Tn, cfg_.order);

  const double cmax = medium_.c.max();
  const auto px = axis_sigma(g.nx, g.dx, bc_[Edge::left], L, bc_[Edge::right], R, cmax, true);
  const auto py = axis_sigma(g.ny, g.dy, bc_[Edge::bottom], B, bc_[Edge::top], Tn, cmax, true);
  const auto ax = axis_sigma(g.nx, g.dx, bc_[Edge::left], L, bc_[Edge::right], R, cmax, false);
  const auto ay = axis_sigma(g.ny, g.dy, bc_[Edge::bottom], B, bc_[Edge::top], Tn, cmax, false);
  has_pml_ = false;
  for (Edge e : {Edge::left, Edge::right, Edge::bottom, Edge::top})
    if (bc_[e].kind == EdgeKind::pml) has_pml_ = true;

  const std::size_t n = g.size();
  c2_.resize(n);
  inv_.resize(n);
  beta_.resize(n);
  a_total_.resize(n);
  flux_c2_.resize(n);
  if (has_pml_) sxsy_.assign(n, 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t q = g.index(i, j);
      const double c = medium_.c[q];
      c2_[q] = c * c;
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      const double A = sign_a_ * medium_.a[q] + px.node[si] + py.node[sj] + ax.node[si] + ay.node[sj] +
                       c2_[q] * bc_.lambda_flux(g, i, j);
      a_total_[q] = A;
      inv_[q] = 1.0 / (1.0 + 0.5 * A * dt_);
      beta_[q] = 1.0 - 0.5 * A * dt_;
      flux_c2_[q] = c2_[q] * bc_.flux_factor(g, i, j);
      if (has_pml_) sxsy_[q] = px.node[si] * py.node[sj];
    }
  }

  if (has_pml_) {
    sx_node_ = px.node;
    sy_node_ = py.node;
    sx_half_ = px.half;
    sy_half_ = py.half;
    for (int i = 0; i + 1 < g.nx; ++i)
      if (sx_half_[static_cast<std::size_t>(i)] > 0.0) psi_cols_x_.push_back(i);
    for (int i = 0; i < g.nx; ++i)
      if (sx_node_[static_cast<std::size_t>(i)] > 0.0) psi_cols_y_.push_back(i);
    auto col_touch = [&](int i) {
      const auto si = static_cast<std::size_t>(i);
      return sx_node_[si] > 0.0 || (i + 1 < g.nx && sx_half_[si] > 0.0) || (i > 0 && sx_half_[si - 1] > 0.0);
    };
    auto row_touch = [&](int j) {
      const auto sj = static_cast<std::size_t>(j);
      return sy_node_[sj] > 0.0 || (j + 1 < g.ny && sy_half_[sj] > 0.0) || (j > 0 && sy_half_[sj - 1] > 0.0);
    };
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if ((col_touch(i) || row_touch(j)) && !plan_.fixed(i, j)) pml_nodes_.push_back(g.index(i, j));
  }
}

bool WaveSolver::needs_extra(const BoundaryDrive* drive) const {
  return has_pml_ || (drive && drive->kind == BoundaryDrive::Kind::flux);
}

void WaveSolver::check_drive(const BoundaryDrive& d) const {
  const Grid2D& g = grid();
  if (d.n_steps == 0 || d.samples.size() != d.n_steps * d.nodes.size())
    throw ConfigError("boundary drive sample count does not match its node list");
  if (d.kind == BoundaryDrive::Kind::value && cfg_.order != 2)
    throw ConfigError("Dirichlet-driven runs need the second-order solver");
  for (std::size_t q : d.nodes) {
    if (q >= g.size()) throw ConfigError("boundary drive node outside the grid");
    const int i = static_cast<int>(q % static_cast<std::size_t>(g.nx));
    const int j = static_cast<int>(q / static_cast<std::size_t>(g.nx));
    if (d.kind == BoundaryDrive::Kind::flux && (plan_.fixed(i, j) || flux_c2_[q] == 0.0))
      throw ConfigError("flux drive node is not on a Robin/Neumann edge");
    if (d.kind == BoundaryDrive::Kind::value && !plan_.fixed(i, j))
      throw ConfigError("value drive node is not a fixed boundary node");
  }
}

void WaveSolver::update_psi(WaveState& s) const {
  const Grid2D& g = grid();
  const int nx = g.nx, ny = g.ny;
  const double dt = dt_;
  const double* u = s.u.data();
  auto upd_x = [&](int i, int j) {
    const std::size_t e = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx - 1) * static_cast<std::size_t>(j);
    const std::size_t q = g.index(i, j);
    const double sx = sx_half_[static_cast<std::size_t>(i)];
    const double c2e = 0.5 * (c2_[q] + c2_[q + 1]);
    const double coef = c2e * (sy_node_[static_cast<std::size_t>(j)] - sx);
    const double old = s.psi_x[e];
    const double nw = ((1.0 - 0.5 * sx * dt) * old + dt * coef * (u[q + 1] - u[q]) / g.dx) / (1.0 + 0.5 * sx * dt);
    s.psi_x[e] = nw;
    s.psi_avg_x[e] = 0.5 * (old + nw);
  };
  auto upd_y = [&](int i, int j) {
    const std::size_t e = g.index(i, j);
    const std::size_t q = e;
    const double sy = sy_half_[static_cast<std::size_t>(j)];
    const double c2e = 0.5 * (c2_[q] + c2_[q + static_cast<std::size_t>(nx)]);
    const double coef = c2e * (sx_node_[static_cast<std::size_t>(i)] - sy);
    const double old = s.psi_y[e];
    const double nw =
        ((1.0 - 0.5 * sy * dt) * old + dt * coef * (u[q + static_cast<std::size_t>(nx)] - u[q]) / g.dy) /
        (1.0 + 0.5 * sy * dt);
    s.psi_y[e] = nw;
    s.psi_avg_y[e] = 0.5 * (old + nw);
  };
  auto row_x = [&](int j) {
    if (sy_node_[static_cast<std::size_t>(j)] > 0.0)
      for (int i = 0; i + 1 < nx; ++i) upd_x(i, j);
    else
      for (int i : psi_cols_x_) upd_x(i, j);
  };
  auto row_y = [&](int j) {
    if (sy_half_[static_cast<std::size_t>(j)] > 0.0)
      for (int i = 0; i < nx; ++i) upd_y(i, j);
    else
      for (int i : psi_cols_y_) upd_y(i, j);
  };
  if (exec_ == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) row_x(j);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny - 1; ++j) row_y(j);
  } else {
    for (int j = 0; j < ny; ++j) row_x(j);
    for (int j = 0; j < ny - 1; ++j) row_y(j);
  }
}

void WaveSolver::assemble_extra(WaveState& s, const BoundaryDrive* drive, std::size_t n) const {
  const Grid2D& g = grid();
  const auto nx = static_cast<std::size_t>(g.nx);
  for (std::size_t q : s.drive_dirty) s.extra[q] = 0.0;
  s.drive_dirty.clear();
  if (has_pml_) {
    for (std::size_t q : pml_nodes_) {
      const std::size_t i = q % nx, j = q / nx;
      const auto kx = plan_.x.kind[i], ky = plan_.y.kind[j];
      const std::size_t ex = i + (nx - 1) * j;  // x-edge i + 1/2
      double div;
      if (kx == StencilKind::flux_lo)
        div = 2.0 * s.psi_avg_x[ex] / g.dx;
      else if (kx == StencilKind::flux_hi)
        div = -2.0 * s.psi_avg_x[ex - 1] / g.dx;
      else
        div = (s.psi_avg_x[ex] - s.psi_avg_x[ex - 1]) / g.dx;
      if (ky == StencilKind::flux_lo)
        div += 2.0 * s.psi_avg_y[q] / g.dy;
      else if (ky == StencilKind::flux_hi)
        div += -2.0 * s.psi_avg_y[q - nx] / g.dy;
      else
        div += (s.psi_avg_y[q] - s.psi_avg_y[q - nx]) / g.dy;
      s.extra[q] = div;
    }
  }
  if (drive && drive->kind == BoundaryDrive::Kind::flux) {
    for (std::size_t k = 0; k < drive->nodes.size(); ++k) {
      const std::size_t q = drive->nodes[k];
      s.extra[q] += flux_c2_[q] * drive->at(n, k);
      s.drive_dirty.push_back(q);
    }
    // Nodes that are also PML nodes are reassigned every step; clearing them again is harmless.
  }
}

WaveState WaveSolver::initial_state(const ScalarField2D& f1, const ScalarField2D& f2, const BoundaryDrive* drive) const {
  const Grid2D& g = grid();
  if (!f1.grid().same_as(g) || !f2.grid().same_as(g)) throw ConfigError("initial data grid does not match the medium");
  if (drive) check_drive(*drive);

  WaveState s;
  s.u = f1;
  s.u_prev = ScalarField2D(g);
  s.extra.assign(needs_extra(drive) ? g.size() : 0, 0.0);
  if (has_pml_) {
    s.psi_x.assign(static_cast<std::size_t>(g.nx - 1) * static_cast<std::size_t>(g.ny), 0.0);
    s.psi_y.assign(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny - 1), 0.0);
    s.psi_avg_x = s.psi_x;
    s.psi_avg_y = s.psi_y;
  }
  if (drive && drive->kind == BoundaryDrive::Kind::value)
    for (std::size_t k = 0; k < drive->nodes.size(); ++k) s.u[drive->nodes[k]] = drive->at(0, k);
  if (!s.extra.empty()) assemble_extra(s, drive, 0);

  // u^{-1} from a second-order Taylor expansion with u_tt(0) taken from the equation.
  ScalarField2D lap(g);
  kernels::laplacian(plan_, s.u.data(), lap.data(), exec_);
  const double dt = dt_;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t q = g.index(i, j);
      if (plan_.fixed(i, j)) {
        s.u_prev[q] = s.u[q];
        continue;
      }
      double acc = c2_[q] * lap[q] - a_total_[q] * f2[q];
      if (!s.extra.empty()) acc += s.extra[q];
      if (has_pml_) acc -= sxsy_[q] * s.u[q];
      s.u_prev[q] = s.u[q] - dt * f2[q] + 0.5 * dt * dt * acc;
    }
  }
  return s;
}

void WaveSolver::check_finite(const WaveState& s) const {
  if (!s.u.all_finite()) throw NumericalError("numerical blow-up at step " + std::to_string(s.step));
}

void WaveSolver::step(WaveState& s, const BoundaryDrive* drive) const {
  if (has_pml_) update_psi(s);
  const bool extra = needs_extra(drive);
  if (extra) {
    if (s.extra.size() != grid().size()) s.extra.assign(grid().size(), 0.0);
    assemble_extra(s, drive, s.step);
  }
  kernels::LeapfrogCoefficients k{c2_.data(), inv_.data(), beta_.data(), has_pml_ ? sxsy_.data() : nullptr,
                                  dt_ * dt_};
  kernels::leapfrog(plan_, k, s.u.data(), s.u_prev.data(), extra ? s.extra.data() : nullptr, exec_);
  std::swap(s.u, s.u_prev);
  ++s.step;
  s.t = static_cast<double>(s.step) * dt_;
  if (drive && drive->kind == BoundaryDrive::Kind::value)
    for (std::size_t q = 0; q < drive->nodes.size(); ++q) s.u[drive->nodes[q]] = drive->at(s.step, q);
  if (s.step % kFiniteCheckEvery == 0 || s.step == n_steps_) check_finite(s);
}

ScalarField2D WaveSolver::velocity(const WaveState& s, const BoundaryDrive* drive) const {
  WaveState next = s;
  step(next, drive);
  ScalarField2D v(grid());
  const double inv2dt = 0.5 / dt_;
  for (std::size_t q = 0; q < v.size(); ++q) v[q] = (next.u[q] - s.u_prev[q]) * inv2dt;
  return v;
}

ScalarField2D WaveSolver::apply_laplacian(const ScalarField2D& u) const {
  if (!u.grid().same_as(grid())) throw ConfigError("field grid does not match the solver grid");
  ScalarField2D out(grid());
  kernels::laplacian(plan_, u.data(), out.data(), exec_);
  return out;
}

RunResult run(const WaveSolver& solver, const ScalarField2D& f1, const ScalarField2D& f2, const RunOptions& opts) {
  const Grid2D& g = solver.grid();
  RunResult r;
  r.state = solver.initial_state(f1, f2, opts.drive);
  WaveState& s = r.state;
  const std::size_t N = solver.n_steps();

  if (!opts.record_nodes.empty()) {
    for (const auto& n : opts.record_nodes)
      if (n.i < 0 || n.i >= g.nx || n.j < 0 || n.j >= g.ny) throw ConfigError("record node outside the solver grid");
    r.record.emplace(opts.record_nodes, solver.dt(), N + 1);
  }
  auto sample = [&](std::size_t n) {
    if (!r.record) return;
    for (std::size_t k = 0; k < opts.record_nodes.size(); ++k) {
      const auto& bn = opts.record_nodes[k];
      r.record->at(n, k) = s.u(bn.i, bn.j);
    }
  };
  sample(0);

  ScalarField2D area, weights, prev, lap;
  const bool track = opts.energy_region.has_value();
  // The fourth-order stencil is not the edge-difference form, so its potential energy is
  // taken from the operator itself: -<u^{n+1}, L u^n>.
  const bool operator_form = solver.order() == 4;
  if (track) {
    area = trapezoid_weights(g, *opts.energy_region);
    weights = area;
    for (std::size_t q = 0; q < weights.size(); ++q) {
      const double c = solver.medium().c[q];
      weights[q] /= c * c;
    }
    r.history.e_half.reserve(N);
    r.history.dissipation.reserve(N);
  }
  const double dt = solver.dt();
  ScalarField2D ut(g);
  for (std::size_t n = 0; n < N; ++n) {
    if (track) prev = s.u_prev;
    solver.step(s, opts.drive);
    sample(n + 1);
    if (track) {
      // s.u = u^{n+1}, s.u_prev = u^n, prev = u^{n-1}
      double kin = 0.0, diss = 0.0;
      for (std::size_t q = 0; q < ut.size(); ++q) {
        const double fwd = (s.u[q] - s.u_prev[q]) / dt;
        const double ctr = (s.u[q] - prev[q]) / (2.0 * dt);
        kin += weights[q] * fwd * fwd;
        diss += weights[q] * solver.medium().a[q] * ctr * ctr;
      }
      double pot = 0.0;
      if (operator_form) {
        lap = solver.apply_laplacian(s.u_prev);
        for (std::size_t q = 0; q < ut.size(); ++q) pot -= area[q] * s.u[q] * lap[q];
      } else {
        pot = dirichlet_form(s.u, s.u_prev, *opts.energy_region);
      }
      r.history.e_half.push_back(kin + pot);
      r.history.dissipation.push_back(diss);
    }
    if (opts.snapshot_every > 0 && opts.on_snapshot && s.step % opts.snapshot_every == 0) opts.on_snapshot(s);
  }
  if (opts.final_velocity) r.velocity = solver.velocity(s, opts.drive);
  return r;
}

ScalarField2D trapezoid_weights(const Grid2D& g, const IndexBox& b) {
  ScalarField2D w(g);
  for (int j = std::max(b.j0, 0); j <= std::min(b.j1, g.ny - 1); ++j)
    for (int i = std::max(b.i0, 0); i <= std::min(b.i1, g.nx - 1); ++i)
      w(i, j) = g.dx * g.dy * trapezoid(i, b.i0, b.i1) * trapezoid(j, b.j0, b.j1);
  return w;
}

double dirichlet_form(const ScalarField2D& u, const ScalarField2D& v, const IndexBox& b) {
  const Grid2D& g = u.grid();
  double s = 0.0;
  // x-edges (i, j)-(i+1, j): length dx, transverse weight dy * trapezoid(j)
  for (int j = b.j0; j <= b.j1; ++j) {
    const double w = g.dy * trapezoid(j, b.j0, b.j1) / g.dx;
    double row = 0.0;
    for (int i = b.i0; i < b.i1; ++i) row += (u(i + 1, j) - u(i, j)) * (v(i + 1, j) - v(i, j));
    s += w * row;
  }
  for (int j = b.j0; j < b.j1; ++j) {
    double row = 0.0;
    for (int i = b.i0; i <= b.i1; ++i)
      row += trapezoid(i, b.i0, b.i1) * (u(i, j + 1) - u(i, j)) * (v(i, j + 1) - v(i, j));
    s += g.dx / g.dy * row;
  }
  return s;
}

double dirichlet_energy(const ScalarField2D& u, const IndexBox& b) { return dirichlet_form(u, u, b); }

double energy(const ScalarField2D& u, const ScalarField2D& ut, const ScalarField2D& c, const IndexBox& b) {
  const Grid2D& g = u.grid();
  if (!ut.grid().same_as(g) || !c.grid().same_as(g)) throw ConfigError("energy fields are on different grids");
  double kin = 0.0;
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) {
      const double w = g.dx * g.dy * trapezoid(i, b.i0, b.i1) * trapezoid(j, b.j0, b.j1);
      kin += w * ut(i, j) * ut(i, j) / (c(i, j) * c(i, j));
    }
  return kin + dirichlet_energy(u, b);
}

std::vector<double> extended_energy(const EnergyHistory& h, double dt) {
  std::vector<double> out(h.e_half.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < out.size(); ++n) {
    acc += h.dissipation[n];
    out[n] = h.e_half[n] + 2.0 * dt * acc;
  }
  return out;
}

double boundary_flux(const ObservationRecord& h) {
  const std::size_t N = h.n_steps();
  if (N < 3) throw ConfigError("boundary flux needs at least 3 record samples");
  const double dt = h.dt();
  double total = 0.0;
  for (std::size_t k = 0; k < h.n_nodes(); ++k) {
    const auto& node = h.nodes()[k];
    if (node.lambda == 0.0 || node.weight == 0.0) continue;
    double integral = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      double ut;
      if (n == 0)
        ut = (h.at(1, k) - h.at(0, k)) / dt;
      else if (n == N - 1)
        ut = (h.at(N - 1, k) - h.at(N - 2, k)) / dt;
      else
        ut = (h.at(n + 1, k) - h.at(n - 1, k)) / (2.0 * dt);
      integral += (n == 0 || n == N - 1 ? 0.5 : 1.0) * ut * ut;
    }
    total += node.weight * node.lambda * integral * dt;
  }
  return total;
}

}  // namespace pat
