#include "pat/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pat/errors.hpp"

namespace pat {

InitialSource back_projection(const ObservationRecord& h, Geometry geometry, const Problem& p) {
  return project_reverse(h, {geometry, TrKind::standard}, p);
}

ReconReport neumann_reconstruct(const ObservationRecord& h, const NeumannConfig& cfg, const Problem& p) {
  if (cfg.n_terms < 1) throw ConfigError("n_terms must be at least 1");
  if (cfg.stop_tol < 0.0) throw ConfigError("stop_tol must be nonnegative");
  const ScalarField2D& c = p.medium.c;

  ReconReport rep;
  InitialSource term = project_reverse(h, cfg.mode, p);
  rep.reconstruction = term;
  rep.increment_norms.push_back(h_norm(term, c));
  if (cfg.record_history) rep.history.push_back(rep.reconstruction.f1);
  if (!std::isfinite(rep.increment_norms[0])) throw NumericalError("first Neumann term is not finite");

  int growth = 0;
  for (std::size_t m = 1; m < cfg.n_terms; ++m) {
    if (rep.increment_norms[0] == 0.0) break;
    term = error_op(term, cfg.mode, p);
    rep.reconstruction += term;
    const double norm = h_norm(term, c);
    if (!std::isfinite(norm)) throw NumericalError("Neumann term " + std::to_string(m) + " is not finite");
    rep.ratios.push_back(norm / rep.increment_norms.back());
    rep.increment_norms.push_back(norm);
    if (cfg.record_history) rep.history.push_back(rep.reconstruction.f1);

    growth = rep.ratios.back() > 1.0 ? growth + 1 : 0;
    if (growth >= 3) {
      std::ostringstream os;
      os << "Neumann series is not contracting: increment norms";
      for (double v : rep.increment_norms) os << ' ' << v;
      os << " (check visibility and the final time T)";
      throw NonContractionError(os.str());
    }
    if (cfg.stop_tol > 0.0 && norm / rep.increment_norms[0] < cfg.stop_tol) {
      rep.stopped_early = m + 1 < cfg.n_terms;
      break;
    }
  }
  return rep;
}

Metrics metrics(const ScalarField2D& reco, const ScalarField2D& truth, const Box& omega0) {
  if (!reco.grid().same_as(truth.grid())) throw ConfigError("reconstruction and truth grids differ");
  const IndexBox b = truth.grid().nodes_in(omega0);
  double num = 0.0, den = 0.0, dmax = 0.0, tmax = 0.0;
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) {
      const double d = reco(i, j) - truth(i, j);
      num += d * d;
      den += truth(i, j) * truth(i, j);
      dmax = std::max(dmax, std::abs(d));
      tmax = std::max(tmax, std::abs(truth(i, j)));
    }
  if (den == 0.0) throw DomainError("relative error is undefined for a zero truth field");
  return {std::sqrt(num / den), dmax / tmax};
}

void write_report_csv(const std::filesystem::path& path, const ReconReport& report, const ScalarField2D* truth,
                      const Box& omega0) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << "term,increment_norm,ratio,rel_l2,rel_linf\n" << std::setprecision(10);
  const std::size_t n = report.increment_norms.size();
  for (std::size_t m = 0; m < n; ++m) {
    os << m << ',' << report.increment_norms[m] << ',';
    if (m > 0) os << report.ratios[m - 1];
    os << ',';
    const ScalarField2D* partial = nullptr;
    if (m < report.history.size())
      partial = &report.history[m];
    else if (m + 1 == n)
      partial = &report.reconstruction.f1;
    if (truth && partial) {
      const Metrics mt = metrics(*partial, *truth, omega0);
      os << mt.rel_l2 << ',' << mt.rel_linf;
    } else {
      os << ',';
    }
    os << '\n';
  }
}

}  // namespace pat
