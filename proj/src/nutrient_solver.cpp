#include "nsch/nutrient_solver.hpp"

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

struct NutrientSolver::Impl {
  Grid2D grid;
  ModelParams params;
  SpectralSolver spectral;

  Impl(const Grid2D& g, const ModelParams& p)
      : grid(g),
        params(p),
        spectral(g.nx, scalar_kind(g), g.hx(), g.ny, scalar_kind(g), g.hy()) {}
};

NutrientSolver::NutrientSolver(const Grid2D& grid, const ModelParams& params)
    : impl_(std::make_unique<Impl>(grid, params)) {}
NutrientSolver::~NutrientSolver() = default;
NutrientSolver::NutrientSolver(NutrientSolver&&) noexcept = default;
NutrientSolver& NutrientSolver::operator=(NutrientSolver&&) noexcept = default;

SigmaStepResult NutrientSolver::step(const ScalarField& sigma_n, const ScalarField& phi_next,
                                     const MacVelocity& v_n, const ScalarField& s_n,
                                     const SigmaStepConfig& cfg) const {
  const ModelParams& p = impl_->params;
  const double dt = cfg.dt;
  if (!(dt > 0.0)) throw StepFailure("sigma_step: dt must be positive", 0.0);
  if (!sigma_n.all_finite() || !phi_next.all_finite() || !v_n.all_finite() || !s_n.all_finite())
    throw StepFailure("sigma_step: non-finite input", 0.0);

  const FaceField nf = face_coefficient(phi_next, p.mobility_n, p.potential.s_max);
  ScalarField explicit_part = s_n - advect_scalar(v_n, sigma_n);
  if (p.chi != 0.0) explicit_part -= p.chi * divergence_of_flux(nf, phi_next);

  const std::size_t n = sigma_n.size();
  std::vector<double> rhs(n), work(n);
  for (std::size_t k = 0; k < n; ++k) rhs[k] = sigma_n[k] / dt + explicit_part[k];

  LinearOp op = [&](std::span<const double> x, std::span<double> y) {
    apply_divergence_of_flux(nf, x, y);
    for (std::size_t k = 0; k < n; ++k) y[k] = x[k] / dt - y[k];
  };
  const SpectralSolver& sp = impl_->spectral;
  const double n_bar = face_mean(nf);
  LinearOp pre = [&](std::span<const double> x, std::span<double> y) {
    sp.solve(x, y, 1.0 / dt, n_bar, n_bar);
  };

  SigmaStepResult out;
  ScalarField guess = sigma_n;
  out.krylov = pcg(op, pre, rhs, guess.values(), cfg.krylov_tol, cfg.krylov_maxit);
  if (!out.krylov.converged || !guess.all_finite())
    throw StepFailure("sigma_step: PCG did not converge", out.krylov.relative_residual);

  apply_divergence_of_flux(nf, guess.values(), work);
  out.sigma = sigma_n;
  for (std::size_t k = 0; k < n; ++k) out.sigma[k] += dt * (explicit_part[k] + work[k]);
  return out;
}

SigmaStepResult sigma_step(const ScalarField& sigma_n, const ScalarField& phi_next,
                           const MacVelocity& v_n, const ScalarField& s_n,
                           const SigmaStepConfig& cfg, const ModelParams& p) {
  return NutrientSolver(sigma_n.grid(), p).step(sigma_n, phi_next, v_n, s_n, cfg);
}

FluxDecomposition flux_decomposition(const ScalarField& phi, const ScalarField& mu,
                                     const ScalarField& sigma, const ModelParams& p) {
  const double s_max = p.potential.s_max;
  const FaceField mf = face_coefficient(phi, p.mobility_m, s_max);
  const FaceField nf = face_coefficient(phi, p.mobility_n, s_max);
  // A Psi' - B lap phi, read off mu so the parts recompose exactly.
  const ScalarField bulk = mu + p.chi * sigma;
  const FaceField grad_sigma = gradient_cc_to_face(sigma);
  const FaceField grad_phi = gradient_cc_to_face(phi);
  FluxDecomposition out;
  out.phi_diffusive = -1.0 * face_product(mf, gradient_cc_to_face(bulk));
  out.phi_chemotactic = p.chi * face_product(mf, grad_sigma);
  out.sigma_diffusive = -1.0 * face_product(nf, grad_sigma);
  out.sigma_active = p.chi * face_product(nf, grad_phi);
  return out;
}

}  // namespace nsch
