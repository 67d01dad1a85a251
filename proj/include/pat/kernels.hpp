#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Data-parallel inner loops. Every kernel has an OpenMP implementation (Exec::parallel)
// and a plain serial reference (Exec::serial) that performs the same floating-point
// operations in the same order per node, so the two agree bit for bit. Reductions are
// summed over fixed-size chunks and the chunk partials are added in order, which keeps
// results independent of the thread count.

namespace pat::kernels {

enum class Exec { serial, parallel };

enum class StencilKind : std::uint8_t {
  fixed,    // node not updated (Dirichlet or outer layer boundary)
  o2,       // (u[-1] - 2u + u[+1]) / h^2
  o4,       // (-u[-2] + 16u[-1] - 30u + 16u[+1] - u[+2]) / (12 h^2)
  flux_lo,  // half cell at the low end: 2 (u[+1] - u) / h^2, normal flux added separately
  flux_hi,  // half cell at the high end: 2 (u[-1] - u) / h^2
};

/// Reflection used by o4 stencils that reach past an end of the line.
enum class Ghost : std::uint8_t { none, even, odd };

struct AxisPlan {
  std::vector<StencilKind> kind;
  Ghost lo_ghost = Ghost::none;
  Ghost hi_ghost = Ghost::none;
  double h = 1.0;

  int n() const { return static_cast<int>(kind.size()); }
};

/// Separable second-difference plan: Laplacian = Dxx(kind_x[i]) + Dyy(kind_y[j]).
struct StencilPlan {
  AxisPlan x;
  AxisPlan y;

  int nx() const { return x.n(); }
  int ny() const { return y.n(); }
  bool fixed(int i, int j) const {
    return x.kind[static_cast<std::size_t>(i)] == StencilKind::fixed ||
           y.kind[static_cast<std::size_t>(j)] == StencilKind::fixed;
  }
};

/// Plain second-order plan with the outermost nodes fixed (Dirichlet box).
StencilPlan dirichlet_box_plan(int nx, int ny, double dx, double dy);

/// out = Laplacian(u) at free nodes, 0 at fixed nodes.
void laplacian(const StencilPlan& plan, const double* u, double* out, Exec exec);

struct LeapfrogCoefficients {
  const double* c2 = nullptr;    // c^2
  const double* inv = nullptr;   // 1 / (1 + A dt / 2)
  const double* beta = nullptr;  // 1 - A dt / 2
  const double* sxsy = nullptr;  // sigma_x sigma_y, may be null
  double dt2 = 0.0;
};

/// One leapfrog update in place: u_prev <- inv * (2u - beta u_prev + dt^2 (c^2 L u + extra - sxsy u)).
/// Fixed nodes get u_prev <- u. `extra` may be null.
void leapfrog(const StencilPlan& plan, const LeapfrogCoefficients& k, const double* u, double* u_prev,
              const double* extra, Exec exec);

constexpr std::size_t kReduceChunk = 4096;

double dot(std::span<const double> a, std::span<const double> b, Exec exec);
/// sum_k w[k] a[k] b[k]
double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b, Exec exec);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y, Exec exec);
/// y = x + beta y
void xpby(std::span<const double> x, double beta, std::span<double> y, Exec exec);

}  // namespace pat::kernels
