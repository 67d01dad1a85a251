#include "pat/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "pat/errors.hpp"
#include "pat/field_io.hpp"

namespace pat {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool contains(const std::vector<Edge>& es, Edge e) { return std::find(es.begin(), es.end(), e) != es.end(); }

EdgeCondition open_edge(const ExperimentConfig& c) {
  return c.boundary.open_kind == OpenKind::pml ? EdgeCondition::pml(c.boundary.pml_delta)
                                               : EdgeCondition::absorber(c.boundary.pml_delta);
}

std::string step_name(std::size_t n) {
  std::ostringstream os;
  os << std::setw(6) << std::setfill('0') << n;
  return os.str();
}

}  // namespace

Experiment Experiment::build(const ExperimentConfig& cfg) {
  cfg.validate();
  Experiment ex;
  ex.cfg = cfg;
  const double h = cfg.grid.half_width;
  const double dx = cfg.grid.dx();
  ex.omega_box = {-h, h, -h, h};
  const double w0 = cfg.domain.omega0_half_width;
  ex.omega0 = {-w0, w0, -w0, w0};

  const bool transparent = cfg.boundary.mode == Geometry::transparent;
  auto is_open = [&](Edge e) { return transparent || contains(cfg.boundary.open_edges, e); };
  const int layer = static_cast<int>(std::lround(cfg.boundary.pml_delta / dx));
  const int L = is_open(Edge::left) ? layer : 0, R = is_open(Edge::right) ? layer : 0;
  const int B = is_open(Edge::bottom) ? layer : 0, Tn = is_open(Edge::top) ? layer : 0;
  ex.grid = Grid2D(cfg.grid.n + L + R, cfg.grid.n + B + Tn, dx, dx, -h - L * dx, -h - B * dx);
  ex.omega = {L, L + cfg.grid.n - 1, B, B + cfg.grid.n - 1};

  if (cfg.medium.speed == SpeedKind::variable)
    ex.profile = SoundSpeedProfile::variable(ex.omega_box, cfg.medium.collar, cfg.medium.transition);
  else
    ex.profile = SoundSpeedProfile::constant(cfg.medium.speed_value);
  ex.medium.c = sample(ex.grid, ex.profile);
  const DampingKind dk = cfg.medium.damping == DampingSetting::a1   ? DampingKind::linear
                         : cfg.medium.damping == DampingSetting::a2 ? DampingKind::speed_proportional
                                                                    : DampingKind::none;
  ex.medium.a = make_damping(ex.grid, dk, ex.medium.c, ex.omega_box, cfg.medium.collar, cfg.medium.transition);
  ex.medium.c_floor = 0.5 * ex.medium.c.min();

  if (transparent) {
    ex.lambda = BoundaryAbsorption(ex.omega_box, {Edge::bottom, Edge::right, Edge::top, Edge::left}, 1.0, 0.0,
                                   cfg.boundary.lambda0);
    ex.bc = BoundarySpec::uniform(open_edge(cfg));
    ex.ray_domain = {ex.omega_box, {false, false, false, false}, ex.lambda};
  } else {
    ex.lambda = BoundaryAbsorption(ex.omega_box, cfg.boundary.gamma_edges, cfg.boundary.lambda, cfg.boundary.taper,
                                   cfg.boundary.lambda0);
    ex.bc = robin_box(ex.grid, ex.lambda);
    for (Edge e : {Edge::left, Edge::right, Edge::bottom, Edge::top})
      if (is_open(e)) ex.bc[e] = open_edge(cfg);
    ex.ray_domain = {ex.omega_box,
                     {!is_open(Edge::left), !is_open(Edge::right), !is_open(Edge::bottom), !is_open(Edge::top)},
                     ex.lambda};
  }
  ex.bc.validate(ex.grid);
  ex.T = cfg.solver.T;
  return ex;
}

Problem Experiment::problem(int order, kernels::Exec exec) const {
  if (!(T > 0.0)) throw ConfigError("final time T is not resolved");
  Problem p;
  p.medium = medium;
  p.bc = bc;
  p.cfg = SolverConfig{order, cfg.solver.courant, T, 0.0};
  p.omega0 = omega0;
  p.window = ObservationWindow{cfg.recon.window_taper, cfg.recon.window_spatial, cfg.boundary.lambda0};
  p.exec = exec;
  p.cg.exec = exec;
  return p;
}

InitialSource Experiment::truth() const {
  ScalarField2D f(grid);
  if (cfg.source.phantom == PhantomKind::shepp_logan)
    for (const Point& c : cfg.source.centers) f += shepp_logan(grid, c, cfg.source.scale);
  const double sigma = cfg.source.sigma > 0.0 ? cfg.source.sigma : 1.5 * grid.dx;
  f = gaussian_smooth(f, sigma);
  if (cfg.source.pat_mode) return InitialSource::pat(f, medium.a, omega0);
  InitialSource s{restrict_to(f, grid.nodes_in(omega0)), ScalarField2D(grid), omega0};
  return s;
}

VisibilityOptions Experiment::ray_options() const {
  VisibilityOptions o;
  o.seeds = cfg.rays.seeds;
  o.angles = cfg.rays.angles;
  o.step = cfg.rays.step > 0.0 ? cfg.rays.step : 0.5 * grid.dx;
  o.horizon = cfg.rays.horizon;
  o.dx = grid.dx;
  return o;
}

ScalarField2D Experiment::omega_speed() const { return medium.c.extract(omega); }

VisibilityReport Experiment::visibility() const {
  return visibility_times(omega0, ray_domain, profile, omega_speed(), ray_options());
}

const VisibilityReport* Experiment::resolve_T(std::optional<VisibilityReport>& cache) {
  if (T > 0.0) return cache ? &*cache : nullptr;
  if (!cache) cache = visibility();
  if (!std::isfinite(cache->T1))
    throw NonContractionError("visibility fails: " + std::to_string(cache->offenders.size()) +
                              " sampled ray pairs never reach Gamma, so T cannot default to 1.2 T1");
  T = 1.2 * cache->T1;
  return &*cache;
}

SimulationOutput simulate(Experiment& ex, const std::filesystem::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<VisibilityReport> vis;
  ex.resolve_T(vis);
  const Problem p = ex.problem(ex.cfg.solver.data_order);
  p.check(ex.cfg.boundary.mode);

  SimulationOutput r;
  r.truth = ex.truth();
  r.T = ex.T;
  const WaveSolver solver(p.medium, p.bc, p.cfg, 1.0, p.exec);
  RunOptions opts;
  opts.record_nodes = p.observation_nodes(ex.cfg.boundary.mode);
  if (!out.empty() && ex.cfg.output.dump_every > 0) {
    opts.snapshot_every = static_cast<std::size_t>(ex.cfg.output.dump_every);
    opts.on_snapshot = [&](const WaveState& s) {
      io::write_field(out / "snapshots" / ("u_" + step_name(s.step) + ".patf"), s.u);
    };
  }
  r.record = std::move(*run(solver, r.truth.f1, r.truth.f2, opts).record);
  r.seconds = seconds_since(t0);

  if (!out.empty()) {
    io::write_record(out / "data.patr", r.record);
    io::write_field(out / "truth.patf", r.truth.f1);
    io::write_pgm(out / "truth.pgm", r.truth.f1, ex.cfg.output.window_lo, ex.cfg.output.window_hi);
  }
  return r;
}

ReconstructionOutput reconstruct(const Experiment& ex, const ObservationRecord& h, const ScalarField2D* truth,
                                 const std::filesystem::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = ex.problem(ex.cfg.solver.recon_order);
  ReconstructionOutput r;
  r.back_projection = back_projection(h, ex.cfg.boundary.mode, p);

  NeumannConfig nc;
  nc.n_terms = static_cast<std::size_t>(ex.cfg.recon.n_terms);
  nc.stop_tol = ex.cfg.recon.stop_tol;
  nc.mode = ex.mode();
  nc.record_history = ex.cfg.recon.history;
  r.neumann = neumann_reconstruct(h, nc, p);
  r.seconds = seconds_since(t0);

  if (truth) {
    r.bp_metrics = metrics(r.back_projection.f1, *truth, ex.omega0);
    r.neumann_metrics = metrics(r.neumann.reconstruction.f1, *truth, ex.omega0);
  }
  if (!out.empty()) {
    const double lo = ex.cfg.output.window_lo, hi = ex.cfg.output.window_hi;
    io::write_field(out / "backprojection.patf", r.back_projection.f1);
    io::write_pgm(out / "backprojection.pgm", r.back_projection.f1, lo, hi);
    io::write_field(out / "neumann.patf", r.neumann.reconstruction.f1);
    io::write_pgm(out / "neumann.pgm", r.neumann.reconstruction.f1, lo, hi);
    write_report_csv(out / "neumann_terms.csv", r.neumann, truth, ex.omega0);
    for (std::size_t m = 0; m < r.neumann.history.size(); ++m) {
      io::write_field(out / "history" / ("neumann_" + step_name(m) + ".patf"), r.neumann.history[m]);
      io::write_pgm(out / "history" / ("neumann_" + step_name(m) + ".pgm"), r.neumann.history[m], lo, hi);
    }
    if (truth) {
      std::ofstream os(out / "metrics.csv");
      os << "method,rel_l2,rel_linf\n" << std::setprecision(10);
      os << "back_projection," << r.bp_metrics->rel_l2 << ',' << r.bp_metrics->rel_linf << '\n';
      os << "neumann," << r.neumann_metrics->rel_l2 << ',' << r.neumann_metrics->rel_linf << '\n';
    }
  }
  return r;
}

}  // namespace pat
