#include "pat/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace pat::kernels {

namespace {

// Value at index m of a line of length n, reflecting through the end nodes when m is
// outside [0, n). Only called for m in [-2, n + 1].
inline double reflected(const double* line, std::ptrdiff_t stride, int m, int n, Ghost lo, Ghost hi) {
  if (m < 0) {
    const double v = line[-m * stride];
    return lo == Ghost::odd ? -v : v;
  }
  if (m >= n) {
    const double v = line[(2 * (n - 1) - m) * stride];
    return hi == Ghost::odd ? -v : v;
  }
  return line[m * stride];
}

// Second difference along one axis at index m of a line starting at `line`.
inline double d2(const AxisPlan& a, double inv_h2, const double* line, std::ptrdiff_t stride, int m) {
  const double* p = line + m * stride;
  switch (a.kind[static_cast<std::size_t>(m)]) {
    case StencilKind::fixed:
      return 0.0;
    case StencilKind::o2:
      return (p[-stride] - 2.0 * p[0] + p[stride]) * inv_h2;
    case StencilKind::flux_lo:
      return 2.0 * (p[stride] - p[0]) * inv_h2;
    case StencilKind::flux_hi:
      return 2.0 * (p[-stride] - p[0]) * inv_h2;
    case StencilKind::o4: {
      const int n = a.n();
      double um2, um1, up1, up2;
      if (m >= 2 && m + 2 < n) {
        um2 = p[-2 * stride];
        um1 = p[-stride];
        up1 = p[stride];
        up2 = p[2 * stride];
      } else {
        um2 = reflected(line, stride, m - 2, n, a.lo_ghost, a.hi_ghost);
        um1 = reflected(line, stride, m - 1, n, a.lo_ghost, a.hi_ghost);
        up1 = reflected(line, stride, m + 1, n, a.lo_ghost, a.hi_ghost);
        up2 = reflected(line, stride, m + 2, n, a.lo_ghost, a.hi_ghost);
      }
      return (-um2 + 16.0 * um1 - 30.0 * p[0] + 16.0 * up1 - up2) * (inv_h2 / 12.0);
    }
  }
  return 0.0;
}

inline double lap_at(const StencilPlan& plan, double ix2, double iy2, const double* u, int i, int j) {
  const int nx = plan.nx();
  const double* row = u + static_cast<std::ptrdiff_t>(j) * nx;
  const double* col = u + i;
  return d2(plan.x, ix2, row, 1, i) + d2(plan.y, iy2, col, nx, j);
}

// One row of the leapfrog update; shared by both execution paths.
inline void leapfrog_row(const StencilPlan& plan, const LeapfrogCoefficients& k, double ix2, double iy2,
                         const double* u, double* u_prev, const double* extra, int j) {
  const int nx = plan.nx();
  const bool row_fixed = plan.y.kind[static_cast<std::size_t>(j)] == StencilKind::fixed;
  const std::size_t base = static_cast<std::size_t>(j) * static_cast<std::size_t>(nx);
  for (int i = 0; i < nx; ++i) {
    const std::size_t q = base + static_cast<std::size_t>(i);
    if (row_fixed || plan.x.kind[static_cast<std::size_t>(i)] == StencilKind::fixed) {
      u_prev[q] = u[q];
      continue;
    }
    double rhs = k.c2[q] * lap_at(plan, ix2, iy2, u, i, j);
    if (extra) rhs += extra[q];
    if (k.sxsy) rhs -= k.sxsy[q] * u[q];
    u_prev[q] = k.inv[q] * (2.0 * u[q] - k.beta[q] * u_prev[q] + k.dt2 * rhs);
  }
}

inline void laplacian_row(const StencilPlan& plan, double ix2, double iy2, const double* u, double* out, int j) {
  const int nx = plan.nx();
  const bool row_fixed = plan.y.kind[static_cast<std::size_t>(j)] == StencilKind::fixed;
  const std::size_t base = static_cast<std::size_t>(j) * static_cast<std::size_t>(nx);
  for (int i = 0; i < nx; ++i) {
    const std::size_t q = base + static_cast<std::size_t>(i);
    if (row_fixed || plan.x.kind[static_cast<std::size_t>(i)] == StencilKind::fixed)
      out[q] = 0.0;
    else
      out[q] = lap_at(plan, ix2, iy2, u, i, j);
  }
}

std::size_t n_chunks(std::size_t n) { return (n + kReduceChunk - 1) / kReduceChunk; }

template <class F>
double chunked_sum(std::size_t n, Exec exec, F&& chunk_sum) {
  const std::size_t nc = n_chunks(n);
  std::vector<double> partial(nc, 0.0);
  const auto nci = static_cast<std::ptrdiff_t>(nc);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nci; ++c) {
      const auto lo = static_cast<std::size_t>(c) * kReduceChunk;
      partial[static_cast<std::size_t>(c)] = chunk_sum(lo, std::min(n, lo + kReduceChunk));
    }
  } else {
    for (std::size_t c = 0; c < nc; ++c) {
      const std::size_t lo = c * kReduceChunk;
      partial[c] = chunk_sum(lo, std::min(n, lo + kReduceChunk));
    }
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace

StencilPlan dirichlet_box_plan(int nx, int ny, double dx, double dy) {
  StencilPlan p;
  p.x.kind.assign(static_cast<std::size_t>(nx), StencilKind::o2);
  p.y.kind.assign(static_cast<std::size_t>(ny), StencilKind::o2);
  p.x.kind.front() = p.x.kind.back() = StencilKind::fixed;
  p.y.kind.front() = p.y.kind.back() = StencilKind::fixed;
  p.x.h = dx;
  p.y.h = dy;
  return p;
}

void laplacian(const StencilPlan& plan, const double* u, double* out, Exec exec) {
  const double ix2 = 1.0 / (plan.x.h * plan.x.h);
  const double iy2 = 1.0 / (plan.y.h * plan.y.h);
  const int ny = plan.ny();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) laplacian_row(plan, ix2, iy2, u, out, j);
  } else {
    for (int j = 0; j < ny; ++j) laplacian_row(plan, ix2, iy2, u, out, j);
  }
}

void leapfrog(const StencilPlan& plan, const LeapfrogCoefficients& k, const double* u, double* u_prev,
              const double* extra, Exec exec) {
  const double ix2 = 1.0 / (plan.x.h * plan.x.h);
  const double iy2 = 1.0 / (plan.y.h * plan.y.h);
  const int ny = plan.ny();
  // Rows only read u, so in-place writes to u_prev are race free.
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) leapfrog_row(plan, k, ix2, iy2, u, u_prev, extra, j);
  } else {
    for (int j = 0; j < ny; ++j) leapfrog_row(plan, k, ix2, iy2, u, u_prev, extra, j);
  }
}

double dot(std::span<const double> a, std::span<const double> b, Exec exec) {
  assert(a.size() == b.size());
  return chunked_sum(a.size(), exec, [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += a[k] * b[k];
    return s;
  });
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b, Exec exec) {
  assert(a.size() == b.size() && w.size() == a.size());
  return chunked_sum(a.size(), exec, [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += w[k] * a[k] * b[k];
    return s;
  });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y, Exec exec) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] += alpha * x[static_cast<std::size_t>(k)];
  } else {
    for (std::ptrdiff_t k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] += alpha * x[static_cast<std::size_t>(k)];
  }
}

void xpby(std::span<const double> x, double beta, std::span<double> y, Exec exec) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto q = static_cast<std::size_t>(k);
      y[q] = x[q] + beta * y[q];
    }
  } else {
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto q = static_cast<std::size_t>(k);
      y[q] = x[q] + beta * y[q];
    }
  }
}

}  // namespace pat::kernels
