#include "pat/rays.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <queue>

#include "pat/errors.hpp"

namespace pat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBisectTol = 1e-10;
constexpr double kCornerTol = 1e-8;
constexpr double kGrazingTol = 1e-6;

struct Phase {
  Point x, xi;
};

Phase flow(const SoundSpeedProfile& c, const Phase& s) {
  const double cv = c(s.x);
  const Point g = c.gradient(s.x);
  const double n = std::hypot(s.xi.x, s.xi.y);
  return {{cv * cv * s.xi.x, cv * cv * s.xi.y}, {-n * g.x, -n * g.y}};
}

Phase axpy(const Phase& s, double h, const Phase& d) {
  return {{s.x.x + h * d.x.x, s.x.y + h * d.x.y}, {s.xi.x + h * d.xi.x, s.xi.y + h * d.xi.y}};
}

Phase rk4(const SoundSpeedProfile& c, const Phase& s, double h) {
  const Phase k1 = flow(c, s);
  const Phase k2 = flow(c, axpy(s, 0.5 * h, k1));
  const Phase k3 = flow(c, axpy(s, 0.5 * h, k2));
  const Phase k4 = flow(c, axpy(s, h, k3));
  Phase out = s;
  out.x.x += h / 6.0 * (k1.x.x + 2.0 * k2.x.x + 2.0 * k3.x.x + k4.x.x);
  out.x.y += h / 6.0 * (k1.x.y + 2.0 * k2.x.y + 2.0 * k3.x.y + k4.x.y);
  out.xi.x += h / 6.0 * (k1.xi.x + 2.0 * k2.xi.x + 2.0 * k3.xi.x + k4.xi.x);
  out.xi.y += h / 6.0 * (k1.xi.y + 2.0 * k2.xi.y + 2.0 * k3.xi.y + k4.xi.y);
  return out;
}

void normalise(const SoundSpeedProfile& c, Phase& s) {
  const double scale = 1.0 / (c(s.x) * std::hypot(s.xi.x, s.xi.y));
  s.xi.x *= scale;
  s.xi.y *= scale;
}

// Largest violation of the box constraints; positive outside.
double outside(const Box& b, Point p) {
  return std::max({b.xmin - p.x, p.x - b.xmax, b.ymin - p.y, p.y - b.ymax});
}

Edge exit_edge(const Box& b, Point p) {
  const double v[4] = {b.xmin - p.x, p.x - b.xmax, b.ymin - p.y, p.y - b.ymax};
  const int k = static_cast<int>(std::max_element(v, v + 4) - v);
  return static_cast<Edge>(k);  // order matches Edge: left, right, bottom, top
}

Point outward_normal(Edge e) {
  switch (e) {
    case Edge::left: return {-1.0, 0.0};
    case Edge::right: return {1.0, 0.0};
    case Edge::bottom: return {0.0, -1.0};
    case Edge::top: return {0.0, 1.0};
  }
  return {};
}

// Steps one ray; lets two branches be advanced in lockstep.
class Tracer {
 public:
  Tracer(const RayState& start, const SoundSpeedProfile& c, const RayDomain& dom, const TraceOptions& opt)
      : c_(c), dom_(dom), opt_(opt) {
    ray_.end = start;
    s_ = {start.x, start.xi};
    normalise(c_, s_);
    ray_.end.xi = s_.xi;
    sample();
  }

  bool done() const {
    return stopped_ || ray_.end.t >= opt_.t_max || (opt_.stop_at_gamma && ray_.hit_gamma.has_value());
  }
  double t() const { return ray_.end.t; }
  BrokenRay& ray() { return ray_; }

  void advance() {
    const double h = std::min(opt_.step, opt_.t_max - ray_.end.t);
    Phase next = rk4(c_, s_, h);
    if (outside(dom_.omega, next.x) <= 0.0) {
      s_ = next;
      normalise(c_, s_);
      ray_.end.t += h;
      sync();
      sample();
      return;
    }
    // Bisection for the exit time within this step.
    double lo = 0.0, hi = h;
    while (hi - lo > kBisectTol) {
      const double mid = 0.5 * (lo + hi);
      if (outside(dom_.omega, rk4(c_, s_, mid).x) > 0.0)
        hi = mid;
      else
        lo = mid;
    }
    Phase hit = rk4(c_, s_, hi);
    const Edge e = exit_edge(dom_.omega, hit.x);
    snap(hit.x, e);
    normalise(c_, hit);
    s_ = hit;
    ray_.end.t += hi;
    sync();
    sample();
    boundary_event(e);
  }

 private:
  void snap(Point& p, Edge e) const {
    const Box& b = dom_.omega;
    switch (e) {
      case Edge::left: p.x = b.xmin; break;
      case Edge::right: p.x = b.xmax; break;
      case Edge::bottom: p.y = b.ymin; break;
      case Edge::top: p.y = b.ymax; break;
    }
    p.x = std::clamp(p.x, b.xmin, b.xmax);
    p.y = std::clamp(p.y, b.ymin, b.ymax);
  }

  void boundary_event(Edge e) {
    const Box& b = dom_.omega;
    const Point p = s_.x;
    const double lam = dom_.lambda(p);
    if (lam > 0.0 && !ray_.hit_gamma) ray_.hit_gamma = ray_.end.t;

    RayEvent ev;
    ev.t = ray_.end.t;
    ev.x = p;
    ev.edge = e;
    ev.xi_in = s_.xi;
    ev.lambda = lam;
    const bool at_x_end = std::abs(p.x - b.xmin) < kCornerTol || std::abs(p.x - b.xmax) < kCornerTol;
    const bool at_y_end = std::abs(p.y - b.ymin) < kCornerTol || std::abs(p.y - b.ymax) < kCornerTol;
    if (at_x_end && at_y_end) {
      ev.kind = RayEventKind::corner;
      ray_.corner = true;
      stop(ev);
      return;
    }
    if (!dom_.reflecting[static_cast<std::size_t>(e)]) {
      ev.kind = RayEventKind::escape;
      ray_.escaped = true;
      stop(ev);
      return;
    }
    const Point n = outward_normal(e);
    const double xn = s_.xi.x * n.x + s_.xi.y * n.y;
    const double cv = c_(p);
    if (std::abs(xn) * cv < kGrazingTol) {
      ev.kind = RayEventKind::grazing;
      ray_.grazing = true;
      stop(ev);
      return;
    }
    s_.xi = {s_.xi.x - 2.0 * xn * n.x, s_.xi.y - 2.0 * xn * n.y};
    const double eta = std::abs(s_.xi.x * n.y - s_.xi.y * n.x);
    ev.kind = RayEventKind::reflection;
    ev.xi_out = s_.xi;
    ev.r = reflection_coefficient(cv, lam, -1.0, std::min(eta, (1.0 - 1e-15) / cv));
    ray_.amplitude *= ev.r;
    ray_.events.push_back(ev);
    sync();
  }

  void stop(RayEvent& ev) {
    ev.xi_out = s_.xi;
    ray_.events.push_back(ev);
    stopped_ = true;
  }

  void sync() {
    ray_.end.x = s_.x;
    ray_.end.xi = s_.xi;
  }

  void sample() {
    if (opt_.store_path) ray_.path.push_back({ray_.end.t, s_.x.x, s_.x.y, ray_.amplitude});
  }

  const SoundSpeedProfile& c_;
  const RayDomain& dom_;
  const TraceOptions& opt_;
  Phase s_;
  BrokenRay ray_;
  bool stopped_ = false;
};

void check_trace(const RayState& start, const RayDomain& dom, const TraceOptions& opt) {
  if (!(opt.step > 0.0)) throw ConfigError("ray step must be positive");
  if (opt.dx > 0.0 && opt.step > 0.5 * opt.dx + 1e-15) throw ConfigError("ray step must not exceed dx / 2");
  if (!dom.omega.contains(start.x, 1e-12)) throw ConfigError("ray must start inside Omega");
  if (start.xi.x == 0.0 && start.xi.y == 0.0) throw ConfigError("ray direction must be nonzero");
}

}  // namespace

RayState ray_start(Point x, double theta, const SoundSpeedProfile& c) {
  const double k = 1.0 / c(x);
  return {x, {k * std::cos(theta), k * std::sin(theta)}, 0.0};
}

BrokenRay trace(const RayState& start, const SoundSpeedProfile& c, const RayDomain& dom, const TraceOptions& opt) {
  check_trace(start, dom, opt);
  Tracer tr(start, c, dom, opt);
  while (!tr.done()) tr.advance();
  return std::move(tr.ray());
}

ScalarField2D distance_to_gamma(const Grid2D& g, const ScalarField2D& c, const BoundaryAbsorption& lambda) {
  if (!c.grid().same_as(g)) throw ConfigError("distance_to_gamma: speed grid mismatch");
  ScalarField2D d(g, kInf);
  std::vector<char> known(g.size(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (i != 0 && j != 0 && i != g.nx - 1 && j != g.ny - 1) continue;
      if (lambda(g.node(i, j)) > 0.0) {
        d(i, j) = 0.0;
        heap.push({0.0, g.index(i, j)});
      }
    }
  if (heap.empty()) throw ConfigError("Gamma is empty: no boundary node has lambda > 0");

  auto known_value = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) return kInf;
    const std::size_t q = g.index(i, j);
    return known[q] ? d[q] : kInf;
  };
  auto solve = [&](int i, int j) {
    const double a = std::min(known_value(i - 1, j), known_value(i + 1, j));
    const double b = std::min(known_value(i, j - 1), known_value(i, j + 1));
    const double f = 1.0 / c(i, j);
    const double ta = a + g.dx * f, tb = b + g.dy * f;
    double best = std::min(ta, tb);
    if (std::isfinite(a) && std::isfinite(b)) {
      // ((t - a)/dx)^2 + ((t - b)/dy)^2 = f^2
      const double wx = 1.0 / (g.dx * g.dx), wy = 1.0 / (g.dy * g.dy);
      const double A = wx + wy, B = -2.0 * (a * wx + b * wy), C = a * a * wx + b * b * wy - f * f;
      const double disc = B * B - 4.0 * A * C;
      if (disc >= 0.0) {
        const double t = (-B + std::sqrt(disc)) / (2.0 * A);
        if (t >= std::max(a, b)) best = std::min(best, t);
      }
    }
    return best;
  };

  while (!heap.empty()) {
    const auto [dq, q] = heap.top();
    heap.pop();
    if (known[q] || dq > d[q]) continue;
    known[q] = 1;
    const int i = static_cast<int>(q % static_cast<std::size_t>(g.nx));
    const int j = static_cast<int>(q / static_cast<std::size_t>(g.nx));
    const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (const auto& n : nb) {
      if (n[0] < 0 || n[1] < 0 || n[0] >= g.nx || n[1] >= g.ny) continue;
      const std::size_t r = g.index(n[0], n[1]);
      if (known[r]) continue;
      const double t = solve(n[0], n[1]);
      if (t < d[r]) {
        d[r] = t;
        heap.push({t, r});
      }
    }
  }
  return d;
}

double dist_to_gamma(Point x, const ScalarField2D& distance) {
  if (!distance.grid().bounds().contains(x, 1e-12)) throw ConfigError("dist_to_gamma: point outside Omega");
  return distance.sample(x);
}

VisibilityReport visibility_times(const Box& omega0, const RayDomain& dom, const SoundSpeedProfile& c,
                                  const ScalarField2D& c_grid, const VisibilityOptions& opt) {
  if (opt.seeds < 1 || opt.angles < 1 || !(opt.step > 0.0) || !(opt.horizon > 0.0))
    throw ConfigError("visibility sampling must be positive");
  if (dom.lambda.empty()) throw ConfigError("Gamma is empty: no boundary node has lambda > 0");

  VisibilityReport rep;
  const ScalarField2D dist = distance_to_gamma(c_grid.grid(), c_grid, dom.lambda);
  const IndexBox b0 = dist.grid().nodes_in(omega0);
  for (int j = b0.j0; j <= b0.j1; ++j)
    for (int i = b0.i0; i <= b0.i1; ++i) rep.T0 = std::max(rep.T0, dist(i, j));

  TraceOptions topt;
  topt.t_max = opt.horizon;
  topt.step = opt.step;
  topt.dx = opt.dx;
  topt.stop_at_gamma = true;
  topt.store_path = false;

  const int ns = opt.seeds, na = opt.angles;
  auto seed = [&](int k) {
    auto lin = [&](double lo, double hi, int m) { return ns == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * m / (ns - 1); };
    return Point{lin(omega0.xmin, omega0.xmax, k % ns), lin(omega0.ymin, omega0.ymax, k / ns)};
  };
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(ns) * ns * na;
  struct PairResult {
    double tp, tm;
    bool excluded, corner;
  };
  std::vector<PairResult> res(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
    const int s = static_cast<int>(idx / na), a = static_cast<int>(idx % na);
    const Point x = seed(s);
    const double theta = std::numbers::pi * a / na;
    Tracer plus(ray_start(x, theta, c), c, dom, topt);
    Tracer minus(ray_start(x, theta + std::numbers::pi, c), c, dom, topt);
    // Advance the branch that is behind until the earlier Gamma hit is settled.
    for (;;) {
      const double hp = plus.ray().hit_gamma.value_or(kInf), hm = minus.ray().hit_gamma.value_or(kInf);
      const double h = std::min(hp, hm);
      const bool pd = plus.done() || plus.t() >= h, md = minus.done() || minus.t() >= h;
      if (pd && md) break;
      if (!pd && (md || plus.t() <= minus.t()))
        plus.advance();
      else
        minus.advance();
    }
    const double hp = plus.ray().hit_gamma.value_or(kInf), hm = minus.ray().hit_gamma.value_or(kInf);
    const double h = std::min(hp, hm);
    // A branch that grazed before the other one reached Gamma leaves the pair undecided.
    const bool graze = (plus.ray().grazing && plus.t() < h) || (minus.ray().grazing && minus.t() < h);
    const bool corner = (plus.ray().corner && !plus.ray().hit_gamma) || (minus.ray().corner && !minus.ray().hit_gamma);
    res[static_cast<std::size_t>(idx)] = {hp, hm, graze, corner};
  }

  for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
    const auto& r = res[static_cast<std::size_t>(idx)];
    ++rep.rays;
    if (r.corner) ++rep.corner_hits;
    if (r.excluded) {
      ++rep.grazing_excluded;
      continue;
    }
    const double m = std::min(r.tp, r.tm);
    const int s = static_cast<int>(idx / na), a = static_cast<int>(idx % na);
    const double theta = std::numbers::pi * a / na;
    if (!std::isfinite(m)) {
      rep.offenders.push_back({seed(s), theta, r.tp, r.tm, "no Gamma hit within the horizon"});
      continue;
    }
    if (m > rep.T1) {
      rep.T1 = m;
      rep.worst_x = seed(s);
      rep.worst_theta = theta;
    }
  }
  rep.T1_reached = rep.T1;
  if (!rep.offenders.empty()) rep.T1 = kInf;
  return rep;
}

void write_ray_csv(const std::filesystem::path& path, const BrokenRay& ray) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << "t,x,y,amplitude\n" << std::setprecision(12);
  for (const auto& s : ray.path) os << s.t << ',' << s.x << ',' << s.y << ',' << s.amplitude << '\n';
}

void write_offenders_csv(const std::filesystem::path& path, const VisibilityReport& rep) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << "x,y,theta,t_plus,t_minus,reason\n" << std::setprecision(12);
  for (const auto& o : rep.offenders)
    os << o.x.x << ',' << o.x.y << ',' << o.theta << ',' << o.t_plus << ',' << o.t_minus << ',' << o.reason << '\n';
}

}  // namespace pat
