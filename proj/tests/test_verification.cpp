#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nsch/grid_ops.hpp"
#include "nsch/verification.hpp"

using namespace nsch;
using doctest::Approx;

TEST_CASE("loglog slope") {
  CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == Approx(2.0));
  CHECK(loglog_slope({1e-3, 2e-3}, {5e-4, 1e-3}) == Approx(1.0));
}

TEST_CASE("equilibrium profile oracle") {
  const TanhProfile t = tanh_profile_oracle(0.05, 1.0, 8001);
  CHECK(t.max_error_vs_tanh <= 1e-8);
  CHECK(t.residual <= 1e-8);
  CHECK(t.sample(0.0) == Approx(0.0).epsilon(1e-12));
  CHECK(t.sample(0.1) == Approx(-t.sample(-0.1)).epsilon(1e-12));
  CHECK(t.energy_normalized == Approx(1.0).epsilon(1e-6));
  // Width scales with epsilon, independent of beta.
  const TanhProfile u = tanh_profile_oracle(0.025, 3.0, 8001);
  CHECK(u.width_10_90() / t.width_10_90() == Approx(0.5).epsilon(1e-6));
}

TEST_CASE("manufactured fields") {
  const Grid2D g(16, 16, 1.0, 1.0, Boundary::Periodic);
  const MmsExact e = mms_exact(g, 0.05);
  CHECK(divergence_max(e.v) <= 1e-12);
  CHECK(e.phi.all_finite());
  const MmsRun coarse = run_mms(16, 1e-2, MmsSetup());
  const MmsRun fine = run_mms(32, 2.5e-3, MmsSetup());
  CHECK(fine.err_phi < coarse.err_phi);
  CHECK(fine.err_v < coarse.err_v);
}

TEST_CASE("chemical potential is the discrete energy gradient") {
  const Grid2D g(24, 24, 1.0, 1.0, Boundary::NeumannNoSlip);
  ScalarField phi(g), sigma(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      phi(i, j) = 0.8 * std::sin(2 * std::numbers::pi * g.xc(i)) * std::cos(3 * g.yc(j));
      sigma(i, j) = 1.0 + 0.2 * g.xc(i);
    }
  ModelParams p;
  p.chi = 0.3;
  const VariationalCheck c = variational_gradient_check(phi, sigma, p, 100);
  CHECK(c.cells_checked == 100);
  CHECK(c.max_relative_error <= 1e-5);
}
