#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nsch/grid_ops.hpp"

using namespace nsch;
using doctest::Approx;

namespace {

ScalarField random_cells(const Grid2D& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (auto& x : f.raw()) x = u(rng);
  return f;
}

MacVelocity random_faces(const Grid2D& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MacVelocity w(g);
  for (auto& x : w.u_raw()) x = u(rng);
  for (auto& x : w.v_raw()) x = u(rng);
  w.enforce_bc();
  return w;
}

}  // namespace

TEST_CASE("laplacian") {
  const Grid2D g(32, 24, 2.0, 1.5, Boundary::NeumannNoSlip);
  CHECK(laplacian(ScalarField(g, 3.7)).max_abs() == 0.0);

  // Discrete Neumann eigenfunction.
  ScalarField f(g);
  const double pi = std::numbers::pi;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = std::cos(pi * g.xc(i) / g.lx);
  const double lam = -(2.0 / (g.hx() * g.hx())) * (1.0 - std::cos(pi * g.hx() / g.lx));
  const ScalarField l = laplacian(f);
  double err = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) err = std::max(err, std::abs(l[k] - lam * f[k]));
  CHECK(err < 1e-10);
  CHECK(lam == Approx(-(pi / g.lx) * (pi / g.lx)).epsilon(1e-2));

  // x^2 on a periodic grid: 2 away from the seam.
  const Grid2D p(16, 16, 1.0, 1.0, Boundary::Periodic);
  ScalarField x2(p);
  for (int j = 0; j < p.ny; ++j)
    for (int i = 0; i < p.nx; ++i) x2(i, j) = p.xc(i) * p.xc(i);
  const ScalarField lp = laplacian(x2);
  for (int j = 0; j < p.ny; ++j)
    for (int i = 1; i < p.nx - 1; ++i) CHECK(lp(i, j) == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("gradient and divergence") {
  const Grid2D g(20, 16, 1.0, 0.8, Boundary::NeumannNoSlip);
  CHECK(gradient_cc_to_face(ScalarField(g, -2.0)).max_abs() == 0.0);

  const ScalarField f = random_cells(g, 3);
  const FaceField gf = gradient_cc_to_face(f);
  for (int j = 0; j < g.ny; ++j) {
    CHECK(gf.u(0, j) == 0.0);
    CHECK(gf.u(g.nx, j) == 0.0);
  }
  for (int i = 0; i < g.nx; ++i) {
    CHECK(gf.v(i, 0) == 0.0);
    CHECK(gf.v(i, g.ny) == 0.0);
  }

  // Linear field on a periodic grid: exact slope except at the seam.
  const Grid2D p(16, 8, 1.0, 1.0, Boundary::Periodic);
  ScalarField lin(p);
  for (int j = 0; j < p.ny; ++j)
    for (int i = 0; i < p.nx; ++i) lin(i, j) = 3.0 * p.xc(i);
  const FaceField gl = gradient_cc_to_face(lin);
  for (int j = 0; j < p.ny; ++j)
    for (int i = 1; i < p.nx; ++i) CHECK(gl.u(i, j) == Approx(3.0).epsilon(1e-12));

  // div(grad f) = lap f.
  const ScalarField a = divergence_face_to_cc(gf), b = laplacian(f);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == Approx(b[k]).epsilon(1e-12));

  // Summation by parts, both boundary conditions.
  for (const Grid2D& gg : {g, p}) {
    const ScalarField h = random_cells(gg, 11);
    const MacVelocity w = random_faces(gg, 12);
    const double lhs = cell_inner(divergence_face_to_cc(w), h);
    const double rhs = face_inner(w, gradient_cc_to_face(h));
    CHECK(std::abs(lhs + rhs) <= 1e-12 * (std::abs(lhs) + 1.0) * gg.nx * gg.ny);
  }
}

TEST_CASE("advection is conservative") {
  for (const Boundary bc : {Boundary::NeumannNoSlip, Boundary::Periodic}) {
    const Grid2D g(16, 12, 1.0, 1.0, bc);
    CHECK(advect_scalar(MacVelocity(g), random_cells(g, 1)).max_abs() == 0.0);
    const MacVelocity w = curl_of_stream_function(
        g, [](double x, double y) { return std::sin(2 * std::numbers::pi * x) * std::cos(3 * y) * x; });
    CHECK(divergence_max(w) < 1e-12);
    CHECK(advect_scalar(w, ScalarField(g, 2.5)).max_abs() < 1e-11);
    const MacVelocity r = random_faces(g, 5);
    CHECK(std::abs(integrate(advect_scalar(r, random_cells(g, 6)))) < 1e-13);
  }
}

TEST_CASE("integration") {
  const Grid2D g(64, 64, 1.0, 1.0, Boundary::NeumannNoSlip);
  CHECK(integrate(ScalarField(g, 2.0)) == Approx(2.0).epsilon(1e-15));
  ScalarField check(g), x(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      check(i, j) = ((i + j) % 2) ? 1.0 : -1.0;
      x(i, j) = g.xc(i);
    }
  CHECK(integrate(check) == 0.0);
  CHECK(integrate(x) == 0.5);
  const Grid2D r(10, 20, 2.0, 3.0, Boundary::NeumannNoSlip);
  CHECK(integrate(ScalarField(r, 1.5)) == Approx(9.0).epsilon(1e-14));
}

TEST_CASE("cell to face interpolation") {
  const Grid2D g(16, 16, 1.0, 1.0, Boundary::NeumannNoSlip);
  const FaceField c = interpolate_cc_to_face(ScalarField(g, 0.7));
  for (double x : c.u_raw()) CHECK(x == Approx(0.7).epsilon(1e-15));
  for (double x : c.v_raw()) CHECK(x == Approx(0.7).epsilon(1e-15));

  ScalarField lin(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) lin(i, j) = 2.0 * g.xc(i) - g.yc(j);
  const FaceField fl = interpolate_cc_to_face(lin);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      CHECK(fl.u(i, j) == Approx(2.0 * i * g.hx() - g.yc(j)).epsilon(1e-13));

  // Round trip cc -> face -> cc converges at second order.
  auto roundtrip_error = [](int n) {
    const Grid2D gg(n, n, 1.0, 1.0, Boundary::Periodic);
    ScalarField f(gg);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        f(i, j) = std::sin(2 * std::numbers::pi * gg.xc(i)) * std::cos(2 * std::numbers::pi * gg.yc(j));
    const FaceField ff = interpolate_cc_to_face(f);
    const CellVector back = face_to_cc(ff);
    return (back.x - f).max_abs();
  };
  const double e1 = roundtrip_error(32), e2 = roundtrip_error(64);
  CHECK(std::log2(e1 / e2) == Approx(2.0).epsilon(0.05));
}

TEST_CASE("divergence check returns seeded divergence") {
  const Grid2D g(16, 16, 1.0, 1.0, Boundary::Periodic);
  CHECK(divergence_max(MacVelocity(g)) == 0.0);
  ScalarField s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s(i, j) = std::cos(2 * std::numbers::pi * g.xc(i)) * std::sin(2 * std::numbers::pi * g.yc(j));
  const FaceField w = gradient_cc_to_face(s);
  CHECK(divergence_max(w) == Approx(laplacian(s).max_abs()).epsilon(1e-12));
}
