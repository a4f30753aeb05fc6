#include "nsch/ch_solver.hpp"

#include <cmath>
#include <vector>

#include "nsch/error.hpp"
#include "nsch/grid_ops.hpp"
#include "nsch/spectral.hpp"

namespace nsch {
namespace {

TransformKind scalar_kind(const Grid2D& g) {
  return g.periodic() ? TransformKind::Periodic : TransformKind::Neumann;
}

double face_mean(const FaceField& f) {
  double acc = 0.0;
  std::size_t n = 0;
  for (double x : f.u_raw()) acc += x, ++n;
  for (double x : f.v_raw()) acc += x, ++n;
  return acc / static_cast<double>(n);
}

}  // namespace

ScalarField chemical_potential(const ScalarField& phi, const ScalarField& sigma,
                               const ModelParams& p) {
  ScalarField mu = laplacian(phi);
  for (std::size_t k = 0; k < mu.size(); ++k)
    mu[k] = p.A * psi_prime(phi[k], p.potential) - p.B * mu[k] - p.chi * sigma[k];
  return mu;
}

struct ChSolver::Impl {
  Grid2D grid;
  ModelParams params;
  SpectralSolver spectral;

  Impl(const Grid2D& g, const ModelParams& p)
      : grid(g),
        params(p),
        spectral(g.nx, scalar_kind(g), g.hx(), g.ny, scalar_kind(g), g.hy()) {}
};

ChSolver::ChSolver(const Grid2D& grid, const ModelParams& params)
    : impl_(std::make_unique<Impl>(grid, params)) {}
ChSolver::~ChSolver() = default;
ChSolver::ChSolver(ChSolver&&) noexcept = default;
ChSolver& ChSolver::operator=(ChSolver&&) noexcept = default;

FaceField ChSolver::effective_mobility(const ScalarField& phi_n, const ChStepConfig& cfg) const {
  const ModelParams& p = impl_->params;
  FaceField m = face_coefficient(phi_n, p.mobility_m, p.potential.s_max);
  if (cfg.stabilized_convection) {
    const FaceField pf = interpolate_cc_to_face(phi_n);
    m += cfg.dt * face_product(pf, pf);
  }
  return m;
}

ChStepResult ChSolver::step(const ScalarField& phi_n, const ScalarField& sigma_n,
                            const MacVelocity& v_n, const ScalarField& gamma_n,
                            const ChStepConfig& cfg) const {
  const ModelParams& p = impl_->params;
  const Grid2D& g = impl_->grid;
  const double dt = cfg.dt;
  if (!(dt > 0.0)) throw StepFailure("ch_step: dt must be positive", 0.0);
  if (!phi_n.all_finite() || !sigma_n.all_finite() || !v_n.all_finite() || !gamma_n.all_finite())
    throw StepFailure("ch_step: non-finite input", 0.0);

  double stab = cfg.stabilization > 0.0 ? cfg.stabilization : p.potential.stabilization;
  if (!(stab > 0.0)) stab = sup_psi_second(p.potential);

  ChStepResult out;
  out.clamped = phi_n.max_abs() > p.potential.s_max;

  const FaceField mob = effective_mobility(phi_n, cfg);
  const FaceField phi_f = interpolate_cc_to_face(phi_n);

  // Explicit part of the phi update.
  ScalarField r_phi = gamma_n - divergence_face_to_cc(face_product(phi_f, v_n));
  if (cfg.stabilized_convection && p.chi != 0.0)
    r_phi += (dt * p.chi) * divergence_of_flux(face_product(phi_f, phi_f), sigma_n);
  ScalarField g_phi = phi_n + dt * r_phi;

  ScalarField r_mu(g);
  for (std::size_t k = 0; k < r_mu.size(); ++k)
    r_mu[k] = p.A * (psi_prime(phi_n[k], p.potential) - stab * phi_n[k]) - p.chi * sigma_n[k];

  const SpectralSolver& sp = impl_->spectral;
  const double a_s = p.A * stab, b = p.B;
  const std::size_t n = g.cells();

  // K^-1 via the exact spectral inverse of A S - B lap.
  auto k_inv = [&](std::span<const double> in, std::span<double> o) {
    sp.solve(in, o, a_s, b, b);
  };

  std::vector<double> rhs(n), tmp(n);
  k_inv(r_mu.values(), tmp);
  for (std::size_t k = 0; k < n; ++k) rhs[k] = g_phi[k] + tmp[k];

  std::vector<double> work(n);
  LinearOp op = [&](std::span<const double> x, std::span<double> y) {
    k_inv(x, y);
    apply_divergence_of_flux(mob, x, work);
    for (std::size_t k = 0; k < n; ++k) y[k] -= dt * work[k];
  };
  const double m_bar = face_mean(mob);
  const std::vector<double> mult = sp.make_multiplier([&](double lx, double ly) {
    const double lam = lx + ly;
    return 1.0 / (1.0 / (a_s + b * lam) + dt * m_bar * lam);
  });
  LinearOp pre = [&](std::span<const double> x, std::span<double> y) { sp.apply(x, y, mult); };

  out.mu = chemical_potential(phi_n, sigma_n, p);
  out.krylov = pcg(op, pre, rhs, out.mu.values(), cfg.krylov_tol, cfg.krylov_maxit);
  if (!out.krylov.converged || !out.mu.all_finite())
    throw StepFailure("ch_step: PCG did not converge", out.krylov.relative_residual);

  apply_divergence_of_flux(mob, out.mu.values(), work);
  out.phi = std::move(g_phi);
  for (std::size_t k = 0; k < n; ++k) out.phi[k] += dt * work[k];
  if (!out.phi.all_finite()) throw StepFailure("ch_step: non-finite phi", 0.0);
  return out;
}

ChStepResult ch_step(const ScalarField& phi_n, const ScalarField& sigma_n, const MacVelocity& v_n,
                     const ScalarField& gamma_n, const ChStepConfig& cfg, const ModelParams& p) {
  return ChSolver(phi_n.grid(), p).step(phi_n, sigma_n, v_n, gamma_n, cfg);
}

}  // namespace nsch
