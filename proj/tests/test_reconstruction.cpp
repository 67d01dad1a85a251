#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "pat/errors.hpp"
#include "pat/reconstruction.hpp"

using namespace pat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Box kOmega{-1.0, 1.0, -1.0, 1.0};
const Box kOmega0{-0.6, 0.6, -0.6, 0.6};

Problem robin_problem(int n, double a, double T) {
  const Grid2D g = Grid2D::covering(kOmega, 2.0 / (n - 1));
  ScalarField2D c(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) c(i, j) = 1.0 + 0.1 * std::sin(2.0 * g.x(i)) * std::cos(1.5 * g.y(j));
  Problem p;
  p.medium = Medium{c, ScalarField2D(g, a), 0.9};
  p.bc = robin_box(g, BoundaryAbsorption(kOmega, {Edge::bottom, Edge::right, Edge::top, Edge::left}, 1.0, 0.0, 0.5));
  p.cfg = SolverConfig{2, 0.3, T, 0.0};
  p.omega0 = kOmega0;
  return p;
}

InitialSource bump(const Grid2D& g, Point c, double r) {
  InitialSource f = InitialSource::zero(g, kOmega0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d2 = (std::pow(g.x(i) - c.x, 2) + std::pow(g.y(j) - c.y, 2)) / (r * r);
      f.f1(i, j) = d2 < 1.0 ? std::pow(1.0 - d2, 4) : 0.0;
    }
  return f;
}

double max_diff(const ScalarField2D& a, const ScalarField2D& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("metrics") {
  const Grid2D g = Grid2D::covering(kOmega, 0.05);
  ScalarField2D truth(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) truth(i, j) = std::exp(-3 * (g.x(i) * g.x(i) + g.y(j) * g.y(j))) - 0.2;

  const Metrics same = metrics(truth, truth, kOmega0);
  CHECK(same.rel_l2 == 0.0);
  CHECK(same.rel_linf == 0.0);

  const Metrics zero = metrics(ScalarField2D(g), truth, kOmega0);
  CHECK_THAT(zero.rel_l2, WithinAbs(1.0, 1e-15));
  CHECK_THAT(zero.rel_linf, WithinAbs(1.0, 1e-15));

  // only Omega0 counts
  const IndexBox b = g.nodes_in(kOmega0);
  double tmax = 0.0;
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) tmax = std::max(tmax, std::abs(truth(i, j)));
  ScalarField2D shifted = truth;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) shifted(i, j) += b.contains(i, j) ? 0.1 * tmax : 50.0;
  CHECK_THAT(metrics(shifted, truth, kOmega0).rel_linf, WithinAbs(0.1, 1e-14));

  CHECK_THROWS_AS(metrics(truth, ScalarField2D(g), kOmega0), DomainError);
}

TEST_CASE("back-projection and the first Neumann term") {
  const Problem p = robin_problem(41, 0.0, 3.0);
  const Grid2D& g = p.grid();
  const ObservationRecord h0 = observe(InitialSource::zero(g, kOmega0), p, Geometry::robin);
  CHECK(back_projection(h0, Geometry::robin, p).f1.max_abs() == 0.0);

  const ObservationRecord h = observe(bump(g, {0.1, 0.15}, 0.3), p, Geometry::robin);
  NeumannConfig nc;
  nc.n_terms = 1;
  const ReconReport r = neumann_reconstruct(h, nc, p);
  const InitialSource bp = back_projection(h, Geometry::robin, p);
  CHECK(max_diff(r.reconstruction.f1, bp.f1) <= 1e-12 * bp.f1.max_abs());
  CHECK(max_diff(r.reconstruction.f2, bp.f2) <= 1e-12 * bp.f2.max_abs());
  // one term is exactly Pi A h
  const InitialSource pah = project_reverse(h, nc.mode, p);
  CHECK(max_diff(r.reconstruction.f1, pah.f1) == 0.0);
  REQUIRE(r.increment_norms.size() == 1);
  CHECK(r.ratios.empty());
}

TEST_CASE("partial sums telescope") {
  const Problem p = robin_problem(41, 1.0, 3.0);
  const Grid2D& g = p.grid();
  const ObservationRecord h = observe(bump(g, {-0.1, 0.2}, 0.35), p, Geometry::robin);
  NeumannConfig nc;
  nc.n_terms = 4;
  nc.record_history = true;
  const ReconReport r = neumann_reconstruct(h, nc, p);
  REQUIRE(r.history.size() == 4);
  REQUIRE(r.increment_norms.size() == 4);

  InitialSource term = project_reverse(h, nc.mode, p);
  CHECK(max_diff(r.history[0], term.f1) <= 1e-10 * term.f1.max_abs());
  CHECK_THAT(r.increment_norms[0], WithinRel(h_norm(term, p.medium.c), 1e-10));
  for (std::size_t m = 1; m <= 3; ++m) {
    term = error_op(term, nc.mode, p);
    const ScalarField2D inc = r.history[m] - r.history[m - 1];
    INFO("m = " << m);
    CHECK(max_diff(inc, term.f1) <= 1e-10 * term.f1.max_abs());
    CHECK_THAT(r.increment_norms[m], WithinRel(h_norm(term, p.medium.c), 1e-10));
    CHECK_THAT(r.ratios[m - 1], WithinRel(r.increment_norms[m] / r.increment_norms[m - 1], 1e-14));
  }
  CHECK(max_diff(r.history.back(), r.reconstruction.f1) == 0.0);
}

TEST_CASE("contraction with full Robin observation") {
  const Problem p = robin_problem(61, 0.0, 4.0);
  const Grid2D& g = p.grid();
  const InitialSource f = bump(g, {0.2, -0.1}, 0.4) + bump(g, {-0.3, 0.3}, 0.15);
  const ObservationRecord h = observe(f, p, Geometry::robin);
  NeumannConfig nc;
  nc.n_terms = 12;
  const ReconReport r = neumann_reconstruct(h, nc, p);
  for (std::size_t m = 0; m < r.ratios.size(); ++m) {
    INFO("ratio " << m + 1 << " = " << r.ratios[m]);
    CHECK(r.ratios[m] < 1.0);
  }
  // geometric tail: late ratios settle
  const std::size_t n = r.ratios.size();
  CHECK(std::abs(r.ratios[n - 1] - r.ratios[n - 2]) < 0.1);
  for (double v : r.increment_norms) CHECK(std::isfinite(v));

  // the series improves on back-projection
  const Metrics mn = metrics(r.reconstruction.f1, f.f1, kOmega0);
  const Metrics mb = metrics(back_projection(h, Geometry::robin, p).f1, f.f1, kOmega0);
  INFO("neumann " << mn.rel_l2 << " back-projection " << mb.rel_l2);
  CHECK(mn.rel_l2 <= mb.rel_l2);
}

TEST_CASE("stop tolerance") {
  const Problem p = robin_problem(41, 0.5, 3.0);
  const Grid2D& g = p.grid();
  const InitialSource f = bump(g, {0.0, 0.1}, 0.35);
  const ObservationRecord h = observe(f, p, Geometry::robin);
  NeumannConfig nc;
  nc.n_terms = 30;
  nc.stop_tol = 0.05;
  const ReconReport r = neumann_reconstruct(h, nc, p);
  CHECK(r.stopped_early);
  CHECK(r.increment_norms.size() < 30);
  CHECK(r.increment_norms.back() / r.increment_norms.front() < nc.stop_tol);

  // further terms change the metrics by less than the tolerance
  NeumannConfig more = nc;
  more.stop_tol = 0.0;
  more.n_terms = r.increment_norms.size() + 5;
  const ReconReport r2 = neumann_reconstruct(h, more, p);
  const Metrics m1 = metrics(r.reconstruction.f1, f.f1, kOmega0);
  const Metrics m2 = metrics(r2.reconstruction.f1, f.f1, kOmega0);
  CHECK(std::abs(m1.rel_l2 - m2.rel_l2) < nc.stop_tol);
  CHECK(std::abs(m1.rel_linf - m2.rel_linf) < nc.stop_tol);
}

TEST_CASE("non-contraction is diagnosed") {
  // standard reversal re-amplifies the damping: the series diverges
  const Problem p = robin_problem(41, 2.0, 3.0);
  const Grid2D& g = p.grid();
  const ObservationRecord h = observe(bump(g, {0.1, 0.2}, 0.35), p, Geometry::robin);
  NeumannConfig nc;
  nc.n_terms = 10;
  nc.mode = {Geometry::robin, TrKind::standard};
  CHECK_THROWS_AS(neumann_reconstruct(h, nc, p), NonContractionError);

  NeumannConfig bad;
  bad.n_terms = 0;
  CHECK_THROWS_AS(neumann_reconstruct(h, bad, p), ConfigError);
  bad.n_terms = 3;
  bad.stop_tol = -1.0;
  CHECK_THROWS_AS(neumann_reconstruct(h, bad, p), ConfigError);
}

TEST_CASE("report csv") {
  const Problem p = robin_problem(41, 0.5, 3.0);
  const Grid2D& g = p.grid();
  const InitialSource f = bump(g, {0.0, 0.0}, 0.3);
  NeumannConfig nc;
  nc.n_terms = 3;
  nc.record_history = true;
  const ReconReport r = neumann_reconstruct(observe(f, p, Geometry::robin), nc, p);
  const auto path = std::filesystem::temp_directory_path() / "pat_report_test.csv";
  write_report_csv(path, r, &f.f1, kOmega0);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "term,increment_norm,ratio,rel_l2,rel_linf");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
    CHECK(line.back() != ',');
  }
  CHECK(rows == 3);
  std::filesystem::remove(path);
}
