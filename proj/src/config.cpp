#include "pat/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pat/errors.hpp"

namespace pat {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Reads keys of one section, remembering which were consumed so leftovers can be reported.
class Section {
 public:
  Section(const pt::ptree& root, const std::string& name) : name_(name) {
    if (auto s = root.get_child_optional(name)) tree_ = *s;
  }

  double number(const std::string& key, double def) {
    const auto v = raw(key);
    if (!v) return def;
    double out = 0.0;
    const auto r = std::from_chars(v->data(), v->data() + v->size(), out);
    if (r.ec != std::errc() || r.ptr != v->data() + v->size()) fail(key, "expected a number, got '" + *v + "'");
    return out;
  }

  int integer(const std::string& key, int def) {
    const auto v = raw(key);
    if (!v) return def;
    int out = 0;
    const auto r = std::from_chars(v->data(), v->data() + v->size(), out);
    if (r.ec != std::errc() || r.ptr != v->data() + v->size()) fail(key, "expected an integer, got '" + *v + "'");
    return out;
  }

  bool boolean(const std::string& key, bool def) {
    const auto v = raw(key);
    if (!v) return def;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    fail(key, "expected true or false, got '" + *v + "'");
    return def;
  }

  std::string text(const std::string& key, const std::string& def) { return raw(key).value_or(def); }

  template <class E>
  E choice(const std::string& key, E def, const std::map<std::string, E>& options) {
    const auto v = raw(key);
    if (!v) return def;
    const auto it = options.find(*v);
    if (it == options.end()) {
      std::string allowed;
      for (const auto& [k, _] : options) allowed += (allowed.empty() ? "" : "|") + k;
      fail(key, "expected one of " + allowed + ", got '" + *v + "'");
    }
    return it->second;
  }

  std::vector<Edge> edges(const std::string& key, const std::vector<Edge>& def) {
    const auto v = raw(key);
    if (!v) return def;
    std::vector<Edge> out;
    for (const auto& s : split(*v, ',')) {
      try {
        out.push_back(edge_from_string(s));
      } catch (const ConfigError& e) {
        fail(key, e.what());
      }
    }
    return out;
  }

  std::vector<Point> points(const std::string& key, const std::vector<Point>& def) {
    const auto v = raw(key);
    if (!v) return def;
    std::vector<Point> out;
    for (const auto& s : split(*v, ';')) {
      std::istringstream is(s);
      Point p;
      std::string rest;
      if (!(is >> p.x >> p.y) || (is >> rest)) fail(key, "expected 'x y' pairs separated by ';', got '" + *v + "'");
      out.push_back(p);
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, _] : tree_)
      if (!used_.count(k)) throw ConfigError("[" + name_ + "] " + k + ": unknown key");
  }

 private:
  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError("[" + name_ + "] " + key + ": " + msg);
  }

  std::string name_;
  pt::ptree tree_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field + ": " + msg);
}

std::string edge_list(const std::vector<Edge>& es) {
  std::string s;
  for (Edge e : es) s += (s.empty() ? "" : ",") + to_string(e);
  return s;
}

}  // namespace

bool SourceSettings::operator==(const SourceSettings& o) const {
  if (centers.size() != o.centers.size()) return false;
  for (std::size_t k = 0; k < centers.size(); ++k)
    if (centers[k].x != o.centers[k].x || centers[k].y != o.centers[k].y) return false;
  return phantom == o.phantom && scale == o.scale && sigma == o.sigma && pat_mode == o.pat_mode;
}

std::string to_string(Edge e) {
  switch (e) {
    case Edge::left: return "left";
    case Edge::right: return "right";
    case Edge::bottom: return "bottom";
    case Edge::top: return "top";
  }
  return "";
}

Edge edge_from_string(const std::string& s) {
  if (s == "left") return Edge::left;
  if (s == "right") return Edge::right;
  if (s == "bottom") return Edge::bottom;
  if (s == "top") return Edge::top;
  throw ConfigError("unknown edge '" + s + "'");
}

void ExperimentConfig::validate() const {
  require(grid.n >= 5 && grid.n <= 20001, "[grid] n", "must be in [5, 20001]");
  require(grid.half_width > 0.0, "[grid] half_width", "must be positive");
  const double dx = grid.dx();
  require(domain.omega0_half_width > 0.0 && domain.omega0_half_width < grid.half_width - dx,
          "[domain] omega0_half_width", "must be positive and at least one cell inside Omega");
  require(medium.speed_value > 0.0, "[medium] speed_value", "must be positive");
  require(medium.collar > 0.0, "[medium] collar", "must be positive");
  require(medium.transition > 0.0, "[medium] transition", "must be positive");
  require(medium.collar + medium.transition < grid.half_width, "[medium] collar",
          "collar + transition must be smaller than the half width");
  require(boundary.lambda >= 0.0, "[boundary] lambda", "must be >= 0");
  require(boundary.taper >= 0.0, "[boundary] taper", "must be >= 0");
  require(boundary.lambda0 >= 0.0, "[boundary] lambda0", "must be >= 0");
  if (boundary.mode == Geometry::transparent || !boundary.open_edges.empty())
    require(boundary.pml_delta >= 4.0 * dx - 1e-12, "[boundary] pml_delta", "layer must span at least 4 cells");
  require(boundary.mode != Geometry::robin || (!boundary.gamma_edges.empty() && boundary.lambda > 0.0),
          "[boundary] gamma_edges", "robin mode needs at least one edge with lambda > 0");
  for (Edge e : boundary.open_edges)
    require(std::find(boundary.gamma_edges.begin(), boundary.gamma_edges.end(), e) == boundary.gamma_edges.end(),
            "[boundary] open_edges", to_string(e) + " is also listed in gamma_edges");
  require(source.scale > 0.0, "[source] scale", "must be positive");
  require(source.sigma >= 0.0, "[source] sigma", "must be >= 0");
  require(source.phantom == PhantomKind::zero || !source.centers.empty(), "[source] centers", "must not be empty");
  require(solver.courant > 0.0 && solver.courant <= 1.0, "[solver] courant", "must lie in (0, 1]");
  require(solver.T >= 0.0, "[solver] T", "must be >= 0 (0 selects 1.2 T1)");
  require(solver.data_order == 2 || solver.data_order == 4, "[solver] data_order", "must be 2 or 4");
  require(solver.recon_order == 2 || solver.recon_order == 4, "[solver] recon_order", "must be 2 or 4");
  require(recon.n_terms >= 1, "[recon] n_terms", "must be >= 1");
  require(recon.stop_tol >= 0.0, "[recon] stop_tol", "must be >= 0");
  require(recon.window_taper >= 0.0 && recon.window_taper < 1.0, "[recon] window_taper", "must lie in [0, 1)");
  require(rays.seeds >= 1, "[rays] seeds", "must be >= 1");
  require(rays.angles >= 1, "[rays] angles", "must be >= 1");
  require(rays.step >= 0.0, "[rays] step", "must be >= 0");
  require(rays.horizon > 0.0, "[rays] horizon", "must be positive");
  require(output.dump_every >= 0, "[output] dump_every", "must be >= 0");
  require(output.window_hi > output.window_lo, "[output] window_hi", "must exceed window_lo");
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree root;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  static const std::set<std::string> sections{"grid",   "domain", "medium", "boundary", "source",
                                              "solver", "recon",  "rays",   "output"};
  for (const auto& [name, sub] : root) {
    if (!sections.count(name)) throw ConfigError("[" + name + "]: unknown section");
    if (sub.empty() && !sub.data().empty()) throw ConfigError(name + ": key outside any section");
  }

  ExperimentConfig c;
  {
    Section s(root, "grid");
    c.grid.n = s.integer("n", c.grid.n);
    c.grid.half_width = s.number("half_width", c.grid.half_width);
    s.finish();
  }
  {
    Section s(root, "domain");
    c.domain.omega0_half_width = s.number("omega0_half_width", c.domain.omega0_half_width);
    s.finish();
  }
  {
    Section s(root, "medium");
    c.medium.speed = s.choice<SpeedKind>("speed", c.medium.speed,
                                         {{"constant", SpeedKind::constant}, {"variable", SpeedKind::variable}});
    c.medium.speed_value = s.number("speed_value", c.medium.speed_value);
    c.medium.damping = s.choice<DampingSetting>(
        "damping", c.medium.damping,
        {{"none", DampingSetting::none}, {"a1", DampingSetting::a1}, {"a2", DampingSetting::a2}});
    c.medium.collar = s.number("collar", c.medium.collar);
    c.medium.transition = s.number("transition", c.medium.transition);
    s.finish();
  }
  {
    Section s(root, "boundary");
    c.boundary.mode = s.choice<Geometry>("mode", c.boundary.mode,
                                         {{"robin", Geometry::robin}, {"transparent", Geometry::transparent}});
    c.boundary.gamma_edges = s.edges("gamma_edges", c.boundary.gamma_edges);
    c.boundary.open_edges = s.edges("open_edges", c.boundary.open_edges);
    c.boundary.lambda = s.number("lambda", c.boundary.lambda);
    c.boundary.taper = s.number("taper", c.boundary.taper);
    c.boundary.lambda0 = s.number("lambda0", c.boundary.lambda0);
    c.boundary.open_kind = s.choice<OpenKind>("open_kind", c.boundary.open_kind,
                                              {{"pml", OpenKind::pml}, {"absorber", OpenKind::absorber}});
    c.boundary.pml_delta = s.number("pml_delta", c.boundary.pml_delta);
    s.finish();
  }
  {
    Section s(root, "source");
    c.source.phantom = s.choice<PhantomKind>("phantom", c.source.phantom,
                                             {{"zero", PhantomKind::zero}, {"shepp_logan", PhantomKind::shepp_logan}});
    c.source.centers = s.points("centers", c.source.centers);
    c.source.scale = s.number("scale", c.source.scale);
    c.source.sigma = s.number("sigma", c.source.sigma);
    c.source.pat_mode = s.boolean("pat_mode", c.source.pat_mode);
    s.finish();
  }
  {
    Section s(root, "solver");
    c.solver.courant = s.number("courant", c.solver.courant);
    c.solver.T = s.number("T", c.solver.T);
    c.solver.data_order = s.integer("data_order", c.solver.data_order);
    c.solver.recon_order = s.integer("recon_order", c.solver.recon_order);
    s.finish();
  }
  {
    Section s(root, "recon");
    c.recon.tr_kind = s.choice<TrKind>("tr_kind", c.recon.tr_kind,
                                       {{"standard", TrKind::standard}, {"dissipative", TrKind::dissipative}});
    c.recon.n_terms = s.integer("n_terms", c.recon.n_terms);
    c.recon.stop_tol = s.number("stop_tol", c.recon.stop_tol);
    c.recon.window_taper = s.number("window_taper", c.recon.window_taper);
    c.recon.window_spatial = s.boolean("window_spatial", c.recon.window_spatial);
    c.recon.history = s.boolean("history", c.recon.history);
    s.finish();
  }
  {
    Section s(root, "rays");
    c.rays.seeds = s.integer("seeds", c.rays.seeds);
    c.rays.angles = s.integer("angles", c.rays.angles);
    c.rays.step = s.number("step", c.rays.step);
    c.rays.horizon = s.number("horizon", c.rays.horizon);
    s.finish();
  }
  {
    Section s(root, "output");
    c.output.dir = s.text("dir", c.output.dir);
    c.output.dump_every = s.integer("dump_every", c.output.dump_every);
    c.output.window_lo = s.number("window_lo", c.output.window_lo);
    c.output.window_hi = s.number("window_hi", c.output.window_hi);
    s.finish();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  std::ostringstream os;
  os << "[grid]\nn = " << c.grid.n << "\nhalf_width = " << fmt(c.grid.half_width) << "\n\n";
  os << "[domain]\nomega0_half_width = " << fmt(c.domain.omega0_half_width) << "\n\n";
  os << "[medium]\nspeed = " << (c.medium.speed == SpeedKind::constant ? "constant" : "variable")
     << "\nspeed_value = " << fmt(c.medium.speed_value) << "\ndamping = "
     << (c.medium.damping == DampingSetting::none ? "none" : c.medium.damping == DampingSetting::a1 ? "a1" : "a2")
     << "\ncollar = " << fmt(c.medium.collar) << "\ntransition = " << fmt(c.medium.transition) << "\n\n";
  os << "[boundary]\nmode = " << (c.boundary.mode == Geometry::robin ? "robin" : "transparent")
     << "\ngamma_edges = " << edge_list(c.boundary.gamma_edges) << "\nopen_edges = " << edge_list(c.boundary.open_edges)
     << "\nlambda = " << fmt(c.boundary.lambda) << "\ntaper = " << fmt(c.boundary.taper)
     << "\nlambda0 = " << fmt(c.boundary.lambda0)
     << "\nopen_kind = " << (c.boundary.open_kind == OpenKind::pml ? "pml" : "absorber")
     << "\npml_delta = " << fmt(c.boundary.pml_delta) << "\n\n";
  os << "[source]\nphantom = " << (c.source.phantom == PhantomKind::zero ? "zero" : "shepp_logan") << "\ncenters = ";
  for (std::size_t k = 0; k < c.source.centers.size(); ++k)
    os << (k ? "; " : "") << fmt(c.source.centers[k].x) << ' ' << fmt(c.source.centers[k].y);
  os << "\nscale = " << fmt(c.source.scale) << "\nsigma = " << fmt(c.source.sigma)
     << "\npat_mode = " << b(c.source.pat_mode) << "\n\n";
  os << "[solver]\ncourant = " << fmt(c.solver.courant) << "\nT = " << fmt(c.solver.T)
     << "\ndata_order = " << c.solver.data_order << "\nrecon_order = " << c.solver.recon_order << "\n\n";
  os << "[recon]\ntr_kind = " << (c.recon.tr_kind == TrKind::standard ? "standard" : "dissipative")
     << "\nn_terms = " << c.recon.n_terms << "\nstop_tol = " << fmt(c.recon.stop_tol)
     << "\nwindow_taper = " << fmt(c.recon.window_taper) << "\nwindow_spatial = " << b(c.recon.window_spatial)
     << "\nhistory = " << b(c.recon.history) << "\n\n";
  os << "[rays]\nseeds = " << c.rays.seeds << "\nangles = " << c.rays.angles << "\nstep = " << fmt(c.rays.step)
     << "\nhorizon = " << fmt(c.rays.horizon) << "\n\n";
  os << "[output]\ndir = " << c.output.dir << "\ndump_every = " << c.output.dump_every
     << "\nwindow_lo = " << fmt(c.output.window_lo) << "\nwindow_hi = " << fmt(c.output.window_hi) << "\n";
  return os.str();
}

}  // namespace pat
