#pragma once

#include <memory>

#include "nsch/core_model.hpp"
#include "nsch/grid.hpp"
#include "nsch/krylov.hpp"

namespace nsch {

struct SigmaStepConfig {
  double dt = 1e-3;
  double krylov_tol = 1e-9;
  int krylov_maxit = 500;
};

struct SigmaStepResult {
  ScalarField sigma;
  KrylovResult krylov;
};

/// Implicit diffusion, explicit convection and cross-diffusion:
///   (sigma+ - sigma)/dt + div(sigma v) = div(n(phi+) grad sigma+)
///                                        - chi div(n(phi+) grad phi+) + S.
/// PCG with a cosine-transform preconditioner (mean n); sigma+ is recovered
/// from the update equation so its mean changes by exactly dt mean(S) up to
/// round-off.
class NutrientSolver {
 public:
  NutrientSolver(const Grid2D& grid, const ModelParams& params);
  ~NutrientSolver();
  NutrientSolver(NutrientSolver&&) noexcept;
  NutrientSolver& operator=(NutrientSolver&&) noexcept;

  SigmaStepResult step(const ScalarField& sigma_n, const ScalarField& phi_next,
                       const MacVelocity& v_n, const ScalarField& s_n,
                       const SigmaStepConfig& cfg) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SigmaStepResult sigma_step(const ScalarField& sigma_n, const ScalarField& phi_next,
                           const MacVelocity& v_n, const ScalarField& s_n,
                           const SigmaStepConfig& cfg, const ModelParams& p);

/// Split fluxes: q_phi = -m grad mu = chemotactic + diffusive with
/// chemotactic = m chi grad sigma, diffusive = -m grad(A Psi' - B lap phi);
/// q_sigma = -n grad(sigma - chi phi) = active + diffusive with
/// active = n chi grad phi, diffusive = -n grad sigma. The diffusive phi part
/// is formed from mu + chi sigma, so mu must be the chemical potential of
/// (phi, sigma).
struct FluxDecomposition {
  FaceField phi_diffusive;
  FaceField phi_chemotactic;
  FaceField sigma_diffusive;
  FaceField sigma_active;
};

FluxDecomposition flux_decomposition(const ScalarField& phi, const ScalarField& mu,
                                     const ScalarField& sigma, const ModelParams& p);

}  // namespace nsch
