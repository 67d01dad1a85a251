// patomo: simulate, reconstruct, rays and metrics subcommands.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pat/errors.hpp"
#include "pat/experiment.hpp"
#include "pat/field_io.hpp"

namespace fs = std::filesystem;
using namespace pat;

namespace {

enum Exit { ok = 0, config_error = 2, numerical_error = 3, not_contracting = 4 };

fs::path out_dir(const std::string& flag, const Experiment& ex) { return flag.empty() ? fs::path(ex.cfg.output.dir) : fs::path(flag); }

int cmd_simulate(const std::string& config, const std::string& out) {
  Experiment ex = Experiment::build(load_config(config));
  const fs::path dir = out_dir(out, ex);
  const auto r = simulate(ex, dir);
  std::printf("simulate: T = %.6g, %zu nodes x %zu steps, max |h| = %.6g, %.1f s -> %s\n", r.T, r.record.n_nodes(),
              r.record.n_steps(), r.record.max_abs(), r.seconds, (dir / "data.patr").c_str());
  return ok;
}

int cmd_reconstruct(const std::string& config, const std::string& data, const std::string& truth_path,
                    const std::string& out, int terms) {
  ExperimentConfig cfg = load_config(config);
  if (terms > 0) cfg.recon.n_terms = terms;
  Experiment ex = Experiment::build(cfg);
  const ObservationRecord h = io::read_record(data);
  // The record fixes the final time of the data run.
  ex.T = h.duration();
  const fs::path dir = out_dir(out, ex);

  std::optional<ScalarField2D> truth;
  if (!truth_path.empty()) {
    truth = io::read_field(truth_path, {ex.grid.x0, ex.grid.y0});
    if (!truth->grid().same_as(ex.grid)) throw ConfigError("truth field grid does not match the config grid");
  }
  // Truth is passed along only for metrics after both reconstructions finish.
  const auto r = reconstruct(ex, h, truth ? &*truth : nullptr, dir);
  std::printf("reconstruct: %zu Neumann terms, last increment ratio %.4g, %.1f s\n", r.neumann.increment_norms.size(),
              r.neumann.ratios.empty() ? 0.0 : r.neumann.ratios.back(), r.seconds);
  if (r.neumann_metrics)
    std::printf("back_projection rel_l2 %.4f rel_linf %.4f\nneumann rel_l2 %.4f rel_linf %.4f\n",
                r.bp_metrics->rel_l2, r.bp_metrics->rel_linf, r.neumann_metrics->rel_l2, r.neumann_metrics->rel_linf);
  return ok;
}

int cmd_rays(const std::string& config, const std::string& out) {
  Experiment ex = Experiment::build(load_config(config));
  const fs::path dir = out_dir(out, ex);
  const VisibilityReport rep = ex.visibility();
  write_offenders_csv(dir / "offenders.csv", rep);
  const double T = ex.cfg.solver.T > 0.0 ? ex.cfg.solver.T : 1.2 * rep.T1;
  const bool visible = rep.visible(T);
  std::printf("T0 = %.6f\nT1 = %.6f\nT1 over pairs reaching Gamma = %.6f\nworst seed = (%.4f, %.4f) theta = %.4f\nrays = %zu grazing_excluded = %zu "
              "corner_hits = %zu offenders = %zu\nT = %.6f visible: %s\n",
              rep.T0, rep.T1, rep.T1_reached, rep.worst_x.x, rep.worst_x.y, rep.worst_theta, rep.rays, rep.grazing_excluded,
              rep.corner_hits, rep.offenders.size(), T, visible ? "T > T1" : "no");
  return visible ? ok : not_contracting;
}

int cmd_metrics(const std::string& reco_path, const std::string& truth_path, const std::string& config) {
  Point origin{0.0, 0.0};
  std::optional<Experiment> ex;
  if (!config.empty()) {
    ex = Experiment::build(load_config(config));
    origin = {ex->grid.x0, ex->grid.y0};
  }
  const ScalarField2D reco = io::read_field(reco_path, origin);
  const ScalarField2D truth = io::read_field(truth_path, origin);
  if (!reco.grid().same_as(truth.grid())) throw ConfigError("reconstruction and truth grids differ");
  const Box region = ex ? ex->omega0 : truth.grid().bounds();
  const Metrics m = metrics(reco, truth, region);
  std::printf("%.10g,%.10g\n", m.rel_l2, m.rel_linf);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photoacoustic tomography in attenuating media: simulation, reconstruction, ray visibility"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed may follow the subcommand
  std::string config, data, truth, out, reco;
  int terms = 0;
  long seed = 0;
  app.add_option("--seed", seed, "Accepted and ignored: the pipeline is deterministic");

  auto* sim = app.add_subcommand("simulate", "Forward data simulation");
  sim->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Output directory (default: [output] dir)");

  auto* rec = app.add_subcommand("reconstruct", "Back-projection and Neumann series reconstruction");
  rec->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);
  rec->add_option("--data", data, "Observation record (PATR)")->required()->check(CLI::ExistingFile);
  rec->add_option("--truth", truth, "Ground truth f1 (PATF) for metrics")->check(CLI::ExistingFile);
  rec->add_option("--out", out, "Output directory (default: [output] dir)");
  rec->add_option("--terms", terms, "Override [recon] n_terms")->check(CLI::PositiveNumber);

  auto* rays = app.add_subcommand("rays", "Visibility times T0, T1 and offenders");
  rays->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);
  rays->add_option("--out", out, "Output directory (default: [output] dir)");

  auto* met = app.add_subcommand("metrics", "Relative L2 and Linf error of a reconstruction");
  met->add_option("reco", reco, "Reconstruction (PATF)")->required()->check(CLI::ExistingFile);
  met->add_option("truth", truth, "Ground truth (PATF)")->required()->check(CLI::ExistingFile);
  met->add_option("--config", config, "Config defining Omega0 and the grid origin")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*sim) return cmd_simulate(config, out);
    if (*rec) return cmd_reconstruct(config, data, truth, out, terms);
    if (*rays) return cmd_rays(config, out);
    if (*met) return cmd_metrics(reco, truth, config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const NonContractionError& e) {
    std::cerr << "non-contraction: " << e.what() << '\n';
    return not_contracting;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_error;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_error;
  }
  return ok;
}
