#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dense_oracle.hpp"
#include "nsch/ch_solver.hpp"
#include "nsch/grid_ops.hpp"
#include "nsch/nutrient_solver.hpp"

using namespace nsch;
using doctest::Approx;

namespace {

ScalarField smooth(const Grid2D& g, double a, double kx, double ky, double off = 0.0) {
  ScalarField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f(i, j) = off + a * std::cos(kx * std::numbers::pi * g.xc(i)) *
                          std::cos(ky * std::numbers::pi * g.yc(j));
  return f;
}

ModelParams coupled_params() {
  ModelParams p;
  p.A = 4.0;
  p.B = 0.02;
  p.chi = 0.3;
  p.mobility_m = CoeffSpec::clamped_polynomial({0.02, 0.0, 0.01}, 0.01, 0.05);
  p.mobility_n = CoeffSpec::clamped_polynomial({0.5, 0.2}, 0.2, 1.0);
  return p;
}

MacVelocity swirl(const Grid2D& g, double amp) {
  return curl_of_stream_function(g, [&](double x, double y) {
    const double sx = std::sin(std::numbers::pi * x), sy = std::sin(std::numbers::pi * y);
    return amp * sx * sx * sy * sy;
  });
}

}  // namespace

TEST_CASE("chemical potential") {
  const Grid2D g(16, 16, 1.0, 1.0, Boundary::NeumannNoSlip);
  ModelParams p;
  p.chi = 0.4;
  CHECK(chemical_potential(ScalarField(g, 1.0), ScalarField(g, 0.0), p).max_abs() == 0.0);
  const ScalarField mu = chemical_potential(ScalarField(g, 0.0), ScalarField(g, 1.5), p);
  for (double x : mu.raw()) CHECK(x == Approx(-0.6));

  // 1D equilibrium profile: mu -> 0 at second order.
  auto profile_mu = [](int n) {
    const double eps = 0.05;
    const Grid2D gg(n, 8, 1.0, 8.0 / n, Boundary::NeumannNoSlip);
    ModelParams q;
    const InterfaceScaling s = epsilon_beta_map(1.0, eps);
    q.A = s.A;
    q.B = s.B;
    ScalarField phi(gg);
    for (int j = 0; j < gg.ny; ++j)
      for (int i = 0; i < gg.nx; ++i)
        phi(i, j) = std::tanh((gg.xc(i) - 0.5) / (std::numbers::sqrt2 * eps));
    return chemical_potential(phi, ScalarField(gg), q).max_abs();
  };
  const double e1 = profile_mu(256), e2 = profile_mu(512);
  CHECK(std::log2(e1 / e2) == Approx(2.0).epsilon(0.05));
}

TEST_CASE("phase-field step fixed points and mass") {
  const Grid2D g(16, 16, 1.0, 1.0, Boundary::NeumannNoSlip);
  ModelParams p;
  ChStepConfig cfg;
  cfg.dt = 1e-3;
  cfg.krylov_tol = 1e-12;
  const ChStepResult r = ch_step(ScalarField(g, 0.3), ScalarField(g), MacVelocity(g),
                                 ScalarField(g), cfg, p);
  for (double x : r.phi.raw()) CHECK(x == Approx(0.3).epsilon(1e-14));
  for (double x : r.mu.raw()) CHECK(x == Approx(p.A * psi_prime(0.3, p.potential)).epsilon(1e-10));

  const double g0 = 0.8;
  const ChStepResult m = ch_step(ScalarField(g, 0.0), ScalarField(g), MacVelocity(g),
                                 ScalarField(g, g0), cfg, p);
  CHECK(mean(m.phi) == Approx(g0 * cfg.dt).epsilon(1e-13));
}

TEST_CASE("phase-field step matches a dense direct solve on 8x8") {
  const Grid2D g(8, 8, 1.0, 1.0, Boundary::NeumannNoSlip);
  const ModelParams p = coupled_params();
  const ScalarField phi = smooth(g, 0.7, 1.0, 2.0, 0.1);
  const ScalarField sigma = smooth(g, 0.4, 2.0, 1.0, 1.0);
  const ScalarField gamma = smooth(g, 0.5, 1.0, 1.0);
  const MacVelocity v = swirl(g, 0.2);
  for (bool shifted : {true, false}) {
    ChStepConfig cfg;
    cfg.dt = 2e-3;
    cfg.krylov_tol = 1e-14;
    cfg.krylov_maxit = 1000;
    cfg.stabilized_convection = shifted;
    const ChStepResult r = ch_step(phi, sigma, v, gamma, cfg, p);
    const oracle::ChDense d = oracle::ch_dense(phi, sigma, v, gamma, cfg.dt, shifted, p);
    CHECK(oracle::rel_diff(oracle::cells_of(r.phi), d.phi) <= 1e-8);
    CHECK(oracle::rel_diff(oracle::cells_of(r.mu), d.mu) <= 1e-8);
  }
}

TEST_CASE("nutrient step") {
  const Grid2D g(16, 16, 1.0, 1.0, Boundary::NeumannNoSlip);
  ModelParams p;
  p.chi = 0.5;
  SigmaStepConfig cfg;
  cfg.dt = 1e-3;
  cfg.krylov_tol = 1e-12;
  const SigmaStepResult r =
      sigma_step(ScalarField(g, 0.9), ScalarField(g, 0.2), MacVelocity(g), ScalarField(g), cfg, p);
  for (double x : r.sigma.raw()) CHECK(x == Approx(0.9).epsilon(1e-14));

  const ScalarField sig = smooth(g, 0.3, 1.0, 1.0, 1.0);
  const SigmaStepResult m = sigma_step(sig, smooth(g, 0.5, 2.0, 1.0), swirl(g, 0.1),
                                       ScalarField(g, -0.7), cfg, p);
  CHECK((mean(m.sigma) - mean(sig)) / cfg.dt == Approx(-0.7).epsilon(1e-10));
}

TEST_CASE("nutrient step matches a dense direct solve on 8x8") {
  const Grid2D g(8, 8, 1.0, 1.0, Boundary::NeumannNoSlip);
  const ModelParams p = coupled_params();
  const ScalarField sigma = smooth(g, 0.4, 2.0, 1.0, 1.0);
  const ScalarField phi = smooth(g, 0.8, 1.0, 1.0);
  const ScalarField s = smooth(g, -0.3, 1.0, 2.0);
  const MacVelocity v = swirl(g, 0.2);
  SigmaStepConfig cfg;
  cfg.dt = 2e-3;
  cfg.krylov_tol = 1e-14;
  cfg.krylov_maxit = 1000;
  const SigmaStepResult r = sigma_step(sigma, phi, v, s, cfg, p);
  const Eigen::VectorXd d = oracle::sigma_dense(sigma, phi, v, s, cfg.dt, p);
  CHECK(oracle::rel_diff(oracle::cells_of(r.sigma), d) <= 1e-8);
}

TEST_CASE("flux decomposition") {
  const Grid2D g(16, 16, 1.0, 1.0, Boundary::NeumannNoSlip);
  ModelParams p = coupled_params();
  const ScalarField phi = smooth(g, 0.8, 1.0, 2.0);
  const ScalarField sigma = smooth(g, 0.3, 2.0, 1.0, 1.0);
  const ScalarField mu = chemical_potential(phi, sigma, p);

  FluxDecomposition d = flux_decomposition(phi, mu, sigma, p);
  const FaceField total = d.phi_diffusive + d.phi_chemotactic;
  const FaceField direct =
      -1.0 * face_product(face_coefficient(phi, p.mobility_m, p.potential.s_max),
                          gradient_cc_to_face(mu));
  const double scale = direct.max_abs();
  CHECK((total - direct).max_abs() <= 1e-12 * scale);

  d = flux_decomposition(ScalarField(g, 0.4), chemical_potential(ScalarField(g, 0.4), sigma, p),
                         sigma, p);
  CHECK(d.sigma_active.max_abs() == 0.0);

  p.chi = 0.0;
  d = flux_decomposition(phi, chemical_potential(phi, sigma, p), sigma, p);
  CHECK(d.phi_chemotactic.max_abs() == 0.0);
  CHECK(d.sigma_active.max_abs() == 0.0);
}

namespace {

ScalarField transpose(const ScalarField& f) {
  const Grid2D& g = f.grid();
  ScalarField t(Grid2D(g.ny, g.nx, g.ly, g.lx, g.bc));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) t(j, i) = f(i, j);
  return t;
}

MacVelocity transpose(const MacVelocity& w) {
  const Grid2D& g = w.grid();
  MacVelocity t(Grid2D(g.ny, g.nx, g.ly, g.lx, g.bc));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) t.v(j, i) = w.u(i, j);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) t.u(j, i) = w.v(i, j);
  return t;
}

}  // namespace

TEST_CASE("steps commute with relabeling x and y") {
  const Grid2D g(16, 12, 1.0, 0.75, Boundary::NeumannNoSlip);
  const ModelParams p = coupled_params();
  ScalarField phi(g), sigma(g), gamma(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      phi(i, j) = 0.6 * std::cos(3.0 * g.xc(i)) * std::cos(5.0 * g.yc(j) + 0.3);
      sigma(i, j) = 1.0 + 0.3 * g.xc(i) * g.yc(j);
      gamma(i, j) = 0.2 * std::sin(4.0 * g.yc(j));
    }
  const MacVelocity v = curl_of_stream_function(g, [](double x, double y) {
    const double sx = std::sin(std::numbers::pi * x), sy = std::sin(std::numbers::pi * y / 0.75);
    return 0.1 * sx * sx * sy * sy * (1.0 + x);
  });
  ChStepConfig cc;
  cc.krylov_tol = 1e-13;
  const ChStepResult a = ch_step(phi, sigma, v, gamma, cc, p);
  const ChStepResult b =
      ch_step(transpose(phi), transpose(sigma), transpose(v), transpose(gamma), cc, p);
  CHECK((transpose(a.phi) - b.phi).max_abs() <= 1e-10);
  CHECK((transpose(a.mu) - b.mu).max_abs() <= 1e-9);

  SigmaStepConfig sc;
  sc.krylov_tol = 1e-13;
  const SigmaStepResult s = sigma_step(sigma, a.phi, v, gamma, sc, p);
  const SigmaStepResult t =
      sigma_step(transpose(sigma), b.phi, transpose(v), transpose(gamma), sc, p);
  CHECK((transpose(s.sigma) - t.sigma).max_abs() <= 1e-10);
}

TEST_CASE("phase-field step does not increase the interface energy") {
  const Grid2D g(32, 32, 1.0, 1.0, Boundary::NeumannNoSlip);
  ModelParams p;
  p.A = 25.0;
  p.B = 0.04;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  ScalarField phi(g);
  for (double& x : phi.raw()) x = u(rng);
  auto gl = [&](const ScalarField& f) {
    double e = 0.0;
    for (double x : f.raw()) e += p.A * psi(x, p.potential) * g.cell_area();
    const FaceField gr = gradient_cc_to_face(f);
    return e + 0.5 * p.B * face_inner(gr, gr);
  };
  const double e0 = gl(phi);
  ChStepConfig cfg;
  cfg.dt = 5e-3;
  cfg.krylov_tol = 1e-12;
  double prev = e0;
  for (int k = 0; k < 20; ++k) {
    phi = ch_step(phi, ScalarField(g), MacVelocity(g), ScalarField(g), cfg, p).phi;
    const double e = gl(phi);
    CHECK(e <= prev + 1e-10 * e0);
    prev = e;
  }
  CHECK(prev < e0);
}

TEST_CASE("nutrient step obeys a discrete maximum principle without cross-diffusion") {
  const Grid2D g(32, 32, 1.0, 1.0, Boundary::NeumannNoSlip);
  ModelParams p;
  p.mobility_n = CoeffSpec::clamped_polynomial({0.5, 0.3}, 0.2, 0.8);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2.0), w(-1.0, 1.0);
  ScalarField sigma(g), phi(g);
  for (double& x : sigma.raw()) x = u(rng);
  for (double& x : phi.raw()) x = w(rng);
  SigmaStepConfig cfg;
  cfg.dt = 1e-2;
  cfg.krylov_tol = 1e-13;
  for (int k = 0; k < 5; ++k) {
    const SigmaStepResult r = sigma_step(sigma, phi, MacVelocity(g), ScalarField(g), cfg, p);
    CHECK(r.sigma.max() <= sigma.max() + 1e-12);
    CHECK(r.sigma.min() >= sigma.min() - 1e-12);
    sigma = r.sigma;
  }
}
