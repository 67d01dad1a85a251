#include <catch_amalgamated.hpp>

#include <filesystem>
#include <string>

#include "pat/config.hpp"
#include "pat/errors.hpp"
#include "pat/experiment.hpp"

using namespace pat;

namespace {

const std::filesystem::path kConfigs = PAT_CONFIG_DIR;

// Parses `text` and returns the ConfigError message, or "" when it parses.
std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults and shipped configs round trip") {
  const ExperimentConfig def = parse_config("");
  CHECK(def == ExperimentConfig{});
  CHECK(parse_config(serialize_config(def)) == def);

  for (const char* name : {"sim1_desk.ini", "sim1.ini", "sim2_desk.ini", "sim2.ini"}) {
    INFO(name);
    const ExperimentConfig c = load_config(kConfigs / name);
    const std::string text = serialize_config(c);
    CHECK(parse_config(text) == c);
    CHECK(serialize_config(parse_config(text)) == text);
  }
}

TEST_CASE("non-default values survive the round trip") {
  ExperimentConfig c;
  c.grid.n = 77;
  c.grid.half_width = 1.5;
  c.domain.omega0_half_width = 1.2;
  c.medium.speed = SpeedKind::constant;
  c.medium.speed_value = 1.25;
  c.medium.damping = DampingSetting::a2;
  c.boundary.mode = Geometry::transparent;
  c.boundary.gamma_edges = {Edge::right, Edge::top};
  c.boundary.open_edges = {Edge::left, Edge::bottom};
  c.boundary.lambda = 0.7;
  c.boundary.open_kind = OpenKind::absorber;
  c.boundary.pml_delta = 0.2;
  c.source.phantom = PhantomKind::zero;
  c.source.centers = {{-0.3, 0.45}, {0.3, -0.45}};
  c.source.sigma = 0.0123456789012345;
  c.source.pat_mode = false;
  c.solver.T = 2.718281828459045;
  c.solver.data_order = 2;
  c.solver.recon_order = 4;
  c.recon.tr_kind = TrKind::standard;
  c.recon.n_terms = 60;
  c.recon.stop_tol = 1e-3;
  c.recon.window_spatial = true;
  c.recon.history = true;
  c.rays.seeds = 16;
  c.rays.angles = 32;
  c.rays.step = 0.004;
  c.output.dir = "some/dir";
  c.output.dump_every = 50;
  c.validate();
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("field-level errors") {
  CHECK(error_of("[grid]\nn = 3\n").find("[grid] n") != std::string::npos);
  CHECK(error_of("[grid]\nn = abc\n").find("n") != std::string::npos);
  CHECK(error_of("[grid]\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(error_of("[nonsense]\nx = 1\n").find("nonsense") != std::string::npos);
  CHECK(error_of("[medium]\ndamping = a3\n").find("damping") != std::string::npos);
  CHECK(error_of("[boundary]\ngamma_edges = bottom,north\n").find("north") != std::string::npos);
  CHECK(error_of("[boundary]\ngamma_edges = bottom,left\nopen_edges = left\n").find("open_edges") !=
        std::string::npos);
  CHECK(error_of("[boundary]\npml_delta = 0.01\n").find("pml_delta") != std::string::npos);
  CHECK(error_of("[solver]\ndata_order = 3\n").find("data_order") != std::string::npos);
  CHECK(error_of("[solver]\ncourant = 1.5\n").find("courant") != std::string::npos);
  CHECK(error_of("[solver]\nT = -1\n").find("[solver] T") != std::string::npos);
  CHECK(error_of("[boundary]\ngamma_edges =\n").find("gamma_edges") != std::string::npos);
  CHECK(error_of("[recon]\nn_terms = 0\n").find("n_terms") != std::string::npos);
  CHECK(error_of("[source]\ncenters = 0.1\n").find("centers") != std::string::npos);
  CHECK(error_of("[domain]\nomega0_half_width = 1.0\n").find("omega0_half_width") != std::string::npos);
  CHECK(error_of("[grid\nn = 5\n").find("syntax") != std::string::npos);
  CHECK_THROWS_AS(load_config(kConfigs / "does_not_exist.ini"), ConfigError);
}

TEST_CASE("comments and edge names") {
  const ExperimentConfig c = parse_config("# comment\n[grid]\n; another\nn = 101\n[boundary]\ngamma_edges = top, right\n");
  CHECK(c.grid.n == 101);
  CHECK(c.boundary.gamma_edges == std::vector<Edge>{Edge::top, Edge::right});
  for (Edge e : {Edge::left, Edge::right, Edge::bottom, Edge::top}) CHECK(edge_from_string(to_string(e)) == e);
  CHECK_THROWS_AS(edge_from_string("up"), ConfigError);
}

TEST_CASE("experiment layout from the desk config") {
  const Experiment ex = Experiment::build(load_config(kConfigs / "sim1_desk.ini"));
  const double dx = 0.01;
  CHECK(ex.grid.dx == Catch::Approx(dx).epsilon(1e-12));
  // Omega is 201 nodes wide; the open left edge gets a 0.1 layer
  CHECK(ex.omega.nx() == 201);
  CHECK(ex.omega.ny() == 201);
  CHECK(ex.grid.ny == 201);
  CHECK(ex.grid.nx == 211);
  CHECK(ex.omega.i0 == 10);
  CHECK(ex.omega_box == Box{-1.0, 1.0, -1.0, 1.0});
  CHECK(ex.omega0.xmax == Catch::Approx(0.9667));
  CHECK(ex.bc[Edge::left].kind == EdgeKind::pml);
  CHECK(ex.bc[Edge::right].kind == EdgeKind::robin);
  CHECK(ex.T == Catch::Approx(3.3));
  CHECK(ex.medium.a.max() > 0.0);

  const InitialSource f = ex.truth();
  CHECK(f.f1.max() > 0.0);
  // PAT mode: f2 = -a f1
  for (std::size_t k = 0; k < f.f1.size(); k += 97) CHECK(f.f2[k] == Catch::Approx(-ex.medium.a[k] * f.f1[k]).margin(1e-15));

  ExperimentConfig bad = load_config(kConfigs / "sim1_desk.ini");
  bad.boundary.gamma_edges.clear();
  CHECK_THROWS_AS(Experiment::build(bad), ConfigError);
}
