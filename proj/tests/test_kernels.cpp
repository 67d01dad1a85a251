#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "pat/kernels.hpp"

using namespace pat::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

AxisPlan o4_axis(int n, double h, Ghost lo, Ghost hi) {
  AxisPlan a;
  a.kind.assign(static_cast<std::size_t>(n), StencilKind::o4);
  a.lo_ghost = lo;
  a.hi_ghost = hi;
  a.h = h;
  return a;
}

// Reference second difference of a line with explicit ghost reflection.
double ghost_value(const std::vector<double>& line, int k, Ghost lo, Ghost hi) {
  const int n = static_cast<int>(line.size());
  if (k < 0) return lo == Ghost::even ? line[static_cast<std::size_t>(-k)] : -line[static_cast<std::size_t>(-k)];
  if (k >= n) {
    const int m = 2 * (n - 1) - k;
    return hi == Ghost::even ? line[static_cast<std::size_t>(m)] : -line[static_cast<std::size_t>(m)];
  }
  return line[static_cast<std::size_t>(k)];
}

}  // namespace

TEST_CASE("naive five-point Laplacian oracle") {
  const int nx = 37, ny = 29;
  const double dx = 0.05, dy = 0.05;
  const auto u = random_vector(static_cast<std::size_t>(nx * ny), 1);
  const StencilPlan plan = dirichlet_box_plan(nx, ny, dx, dy);
  std::vector<double> out(u.size());
  laplacian(plan, u.data(), out.data(), Exec::serial);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(i + nx * j);
      if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) {
        REQUIRE(out[k] == 0.0);
        continue;
      }
      const double ref = (u[k - 1] - 2 * u[k] + u[k + 1]) / (dx * dx) +
                         (u[k - static_cast<std::size_t>(nx)] - 2 * u[k] + u[k + static_cast<std::size_t>(nx)]) / (dy * dy);
      REQUIRE_THAT(out[k], Catch::Matchers::WithinAbs(ref, 1e-10 * std::abs(ref) + 1e-9));
    }
}

TEST_CASE("fourth-order stencil with ghost reflection") {
  const int nx = 23, ny = 19;
  const double h = 0.1;
  const auto u = random_vector(static_cast<std::size_t>(nx * ny), 2);
  for (Ghost gx : {Ghost::even, Ghost::odd})
    for (Ghost gy : {Ghost::even, Ghost::odd}) {
      StencilPlan plan{o4_axis(nx, h, gx, gx), o4_axis(ny, h, gy, gy)};
      std::vector<double> out(u.size());
      laplacian(plan, u.data(), out.data(), Exec::serial);
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          std::vector<double> row(static_cast<std::size_t>(nx)), col(static_cast<std::size_t>(ny));
          for (int m = 0; m < nx; ++m) row[static_cast<std::size_t>(m)] = u[static_cast<std::size_t>(m + nx * j)];
          for (int m = 0; m < ny; ++m) col[static_cast<std::size_t>(m)] = u[static_cast<std::size_t>(i + nx * m)];
          auto d4 = [&](const std::vector<double>& line, int k, Ghost g) {
            const double a = ghost_value(line, k - 2, g, g), b = ghost_value(line, k - 1, g, g);
            const double c = ghost_value(line, k, g, g), d = ghost_value(line, k + 1, g, g);
            const double e = ghost_value(line, k + 2, g, g);
            return (-a + 16 * b - 30 * c + 16 * d - e) / (12 * h * h);
          };
          const double ref = d4(row, i, gx) + d4(col, j, gy);
          REQUIRE_THAT(out[static_cast<std::size_t>(i + nx * j)],
                       Catch::Matchers::WithinAbs(ref, 1e-10 * std::abs(ref) + 1e-9));
        }
    }
}

TEST_CASE("fourth-order stencil is exact on quartics") {
  const int n = 15;
  const double h = 0.1;
  StencilPlan plan{o4_axis(n, h, Ghost::none, Ghost::none), o4_axis(n, h, Ghost::none, Ghost::none)};
  for (int k = 0; k < 2; ++k) plan.x.kind[static_cast<std::size_t>(k)] = plan.x.kind[static_cast<std::size_t>(n - 1 - k)] = StencilKind::fixed;
  for (int k = 0; k < 2; ++k) plan.y.kind[static_cast<std::size_t>(k)] = plan.y.kind[static_cast<std::size_t>(n - 1 - k)] = StencilKind::fixed;
  std::vector<double> u(static_cast<std::size_t>(n * n)), out(u.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = i * h, y = j * h;
      u[static_cast<std::size_t>(i + n * j)] = x * x * x - 2 * y * y * y + 0.5 * x * x;
    }
  laplacian(plan, u.data(), out.data(), Exec::serial);
  for (int j = 2; j < n - 2; ++j)
    for (int i = 2; i < n - 2; ++i)
      REQUIRE_THAT(out[static_cast<std::size_t>(i + n * j)],
                   Catch::Matchers::WithinAbs(6 * i * h - 12 * j * h + 1.0, 1e-9));
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  const int nx = 301, ny = 157;
  const std::size_t n = static_cast<std::size_t>(nx * ny);
  const auto u = random_vector(n, 3), up = random_vector(n, 4), extra = random_vector(n, 5);
  auto c2 = random_vector(n, 6), inv = random_vector(n, 7), beta = random_vector(n, 8), sxsy = random_vector(n, 9);
  for (auto& v : c2) v = 1.0 + 0.3 * v;

  StencilPlan plan{o4_axis(nx, 0.01, Ghost::even, Ghost::odd), o4_axis(ny, 0.01, Ghost::odd, Ghost::even)};
  plan.x.kind[0] = StencilKind::flux_lo;
  plan.x.kind[static_cast<std::size_t>(nx - 1)] = StencilKind::fixed;
  plan.y.kind[1] = StencilKind::o2;

  std::vector<double> ls(n), lp(n);
  laplacian(plan, u.data(), ls.data(), Exec::serial);
  laplacian(plan, u.data(), lp.data(), Exec::parallel);
  CHECK(ls == lp);

  const LeapfrogCoefficients k{c2.data(), inv.data(), beta.data(), sxsy.data(), 1e-5};
  auto a = up, b = up;
  leapfrog(plan, k, u.data(), a.data(), extra.data(), Exec::serial);
  leapfrog(plan, k, u.data(), b.data(), extra.data(), Exec::parallel);
  CHECK(a == b);

  CHECK(dot(u, up, Exec::serial) == dot(u, up, Exec::parallel));
  CHECK(weighted_dot(c2, u, up, Exec::serial) == weighted_dot(c2, u, up, Exec::parallel));
  auto y1 = up, y2 = up;
  axpy(0.7, u, y1, Exec::serial);
  axpy(0.7, u, y2, Exec::parallel);
  CHECK(y1 == y2);
  xpby(u, -0.3, y1, Exec::serial);
  xpby(u, -0.3, y2, Exec::parallel);
  CHECK(y1 == y2);
}

TEST_CASE("leapfrog update formula") {
  const int nx = 9, ny = 8;
  const std::size_t n = static_cast<std::size_t>(nx * ny);
  const auto u = random_vector(n, 10), up = random_vector(n, 11), extra = random_vector(n, 12);
  std::vector<double> c2(n, 1.5), inv(n, 0.9), beta(n, 1.1), sxsy(n, 0.25);
  const StencilPlan plan = dirichlet_box_plan(nx, ny, 0.1, 0.1);
  std::vector<double> lu(n);
  laplacian(plan, u.data(), lu.data(), Exec::serial);
  auto next = up;
  const double dt2 = 1e-3;
  leapfrog(plan, {c2.data(), inv.data(), beta.data(), sxsy.data(), dt2}, u.data(), next.data(), extra.data(),
           Exec::serial);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(i + nx * j);
      const double ref = plan.fixed(i, j) ? u[k]
                                          : 0.9 * (2 * u[k] - 1.1 * up[k] + dt2 * (1.5 * lu[k] + extra[k] - 0.25 * u[k]));
      REQUIRE_THAT(next[k], Catch::Matchers::WithinAbs(ref, 1e-13));
    }
}

TEST_CASE("chunked reductions match a long-double reference") {
  const auto a = random_vector(100003, 13), b = random_vector(100003, 14);
  long double ref = 0.0L;
  for (std::size_t k = 0; k < a.size(); ++k) ref += static_cast<long double>(a[k]) * b[k];
  CHECK_THAT(dot(a, b, Exec::parallel), Catch::Matchers::WithinAbs(static_cast<double>(ref), 1e-10));
}
