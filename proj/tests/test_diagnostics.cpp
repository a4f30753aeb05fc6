#include <doctest.h>

#include <cmath>

#include "nsch/ch_solver.hpp"
#include "nsch/diagnostics.hpp"
#include "nsch/grid_ops.hpp"

using namespace nsch;
using doctest::Approx;

TEST_CASE("energy of simple states") {
  const Grid2D g(16, 16, 1.0, 1.0, Boundary::NeumannNoSlip);
  ModelParams p;
  p.chi = 0.5;
  const MacVelocity v0(g);
  CHECK(total_energy(ScalarField(g, 1.0), ScalarField(g), v0, p).E_total == 0.0);
  CHECK(total_energy(ScalarField(g, -1.0), ScalarField(g), v0, p).E_total == 0.0);
  CHECK(total_energy(ScalarField(g, 0.0), ScalarField(g), v0, p).E_total ==
        Approx(p.A * 0.25));
  // sigma = 2: 1/2 * 4 + chi * 2 * (1 - phi)
  CHECK(total_energy(ScalarField(g, 1.0), ScalarField(g, 2.0), v0, p).E_total == Approx(2.0));
  CHECK(total_energy(ScalarField(g, -1.0), ScalarField(g, 2.0), v0, p).E_total == Approx(4.0));

  const Grid2D big(8, 8, 2.0, 1.0, Boundary::NeumannNoSlip);
  const EnergyReport r = total_energy(ScalarField(big, 1.0), ScalarField(big, 1.0),
                                      MacVelocity(big), p, 0.75);
  CHECK(r.t == 0.75);
  CHECK(r.E_chemical == Approx(1.0));
  CHECK(r.E_total == Approx(r.E_kinetic + r.E_ginzburg_landau + r.E_chemical));
}

TEST_CASE("kinetic energy counts interior faces") {
  const Grid2D g(8, 8, 1.0, 1.0, Boundary::Periodic);
  MacVelocity v(g);
  for (double& x : v.u_raw()) x = 1.0;
  for (double& x : v.v_raw()) x = 2.0;
  v.enforce_bc();
  ModelParams p;
  const EnergyReport r = total_energy(ScalarField(g, 1.0), ScalarField(g), v, p);
  CHECK(r.E_kinetic == Approx(2.5));
}

TEST_CASE("dissipation vanishes at equilibrium") {
  const Grid2D g(16, 16, 1.0, 1.0, Boundary::NeumannNoSlip);
  ModelParams p;
  p.chi = 0.2;
  const ScalarField phi(g, 0.5), sigma(g, 0.3);
  const Dissipation d = dissipation_rates(phi, chemical_potential(phi, sigma, p), sigma,
                                          MacVelocity(g), ScalarField(g), ScalarField(g), p);
  CHECK(d.D_mu == 0.0);
  CHECK(d.D_sigma == 0.0);
  CHECK(d.D_visc == 0.0);
  CHECK(d.W_sources == 0.0);
}

TEST_CASE("balance residual and mass balance") {
  EnergyReport a, b;
  a.E_total = 2.0;
  b.E_total = 1.9;
  Dissipation d;
  d.D_mu = 0.5;
  d.D_visc = 0.25;
  d.W_sources = -0.25;
  CHECK(energy_balance_residual(a, b, d, 0.1) == Approx(-1.0 + 0.75 + 0.25));

  const Grid2D g(8, 8, 1.0, 1.0, Boundary::NeumannNoSlip);
  const ScalarField phi(g, 0.1), phi2(g, 0.3), sig(g, 1.0), sig2(g, 0.9);
  const MassResidual m =
      mass_balance(phi, phi2, sig, sig2, ScalarField(g, 2.0), ScalarField(g, -1.0), 0.1);
  CHECK(std::abs(m.phi) <= 1e-12);
  CHECK(std::abs(m.sigma) <= 1e-12);
}

TEST_CASE("health") {
  const Grid2D g(10, 10, 1.0, 1.0, Boundary::Periodic);
  MacVelocity v(g, 1.0);
  const Health ok = health(ScalarField(g), ScalarField(g), v, 0.01, 0.5, 3);
  CHECK(ok.finite);
  CHECK(ok.cfl_margin == Approx(5.0));
  CHECK(ok.ok());
  CHECK_FALSE(health(ScalarField(g), ScalarField(g), v, 0.1, 0.5, 3).ok());
  ScalarField bad(g);
  bad[3] = std::nan("");
  CHECK_FALSE(health(bad, ScalarField(g), v, 0.01, 0.5, 3).finite);
}

TEST_CASE("energy decomposition and dissipation signs on a random state") {
  const Grid2D g(24, 24, 1.0, 1.0, Boundary::NeumannNoSlip);
  ModelParams p;
  p.chi = 0.4;
  ScalarField phi(g), sigma(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      phi(i, j) = std::sin(7.0 * g.xc(i) + 3.0 * g.yc(j));
      sigma(i, j) = std::cos(5.0 * g.xc(i)) + g.yc(j);
    }
  const MacVelocity v = curl_of_stream_function(g, [](double x, double y) {
    return std::sin(M_PI * x) * std::sin(M_PI * x) * std::sin(M_PI * y) * std::sin(M_PI * y);
  });
  const EnergyReport r = total_energy(phi, sigma, v, p);
  CHECK(r.E_total == r.E_kinetic + r.E_ginzburg_landau + r.E_chemical);
  const Dissipation d = dissipation_rates(phi, chemical_potential(phi, sigma, p), sigma, v,
                                          ScalarField(g), ScalarField(g), p);
  CHECK(d.D_mu > 0.0);
  CHECK(d.D_sigma > 0.0);
  CHECK(d.D_visc > 0.0);
}
