#pragma once

#include <memory>

#include "nsch/core_model.hpp"
#include "nsch/grid.hpp"
#include "nsch/krylov.hpp"

namespace nsch {

struct NsStepConfig {
  double dt = 1e-3;
  double krylov_tol = 1e-9;
  int krylov_maxit = 500;
  /// Bound on max |div v+| relative to max(1, max |v+|).
  double poisson_tol = 1e-8;
  /// Capillary force in potential form -phi_n grad(mu+ + chi sigma_n),
  /// matching the shifted transport velocity of the phase step. Off: the
  /// direct form (mu+ + chi sigma)_f grad phi+.
  bool potential_form = true;
};

struct NsStepResult {
  MacVelocity v;
  ScalarField q;  // modified pressure, mean zero
  KrylovResult krylov;
  double div_max = 0.0;
};

/// (mu + chi sigma) interpolated to faces times the face gradient of phi.
FaceField korteweg_force(const ScalarField& mu, const ScalarField& sigma, const ScalarField& phi,
                         double chi);

/// -phi_f grad(mu + chi sigma). Differs from korteweg_force by the exact
/// discrete gradient grad(phi (mu + chi sigma)).
FaceField capillary_force_potential(const ScalarField& mu, const ScalarField& sigma,
                                    const ScalarField& phi, double chi);

/// Conservative centered convection C(a) w with averaged advecting fluxes.
/// Skew-symmetric in w whenever a is discretely divergence free.
MacVelocity convection_operator(const MacVelocity& a, const MacVelocity& w);

/// div(2 eta(phi) D w): eta at cell centers for the normal stresses, averaged
/// to cell corners for the shear stress. No-slip walls use antisymmetric
/// ghosts for the tangential component.
MacVelocity viscous_operator(const MacVelocity& w, const ScalarField& phi, const ModelParams& p);

/// -<viscous_operator(w), w>: the discrete form of the integral of 2 eta |Dw|^2.
double viscous_dissipation(const MacVelocity& w, const ScalarField& phi, const ModelParams& p);

/// Discrete Helmholtz projection: returns w - grad q with div of the result
/// zero, q mean zero (written to q_out when given).
MacVelocity project(const MacVelocity& w, ScalarField* q_out = nullptr);

/// One momentum step:
///   (v~ - u*)/dt + C(v_n) v~ = div(2 eta(phi+) D v~) + f,
///   u* = v_n + dt F_cap,  v+ = v~ - dt grad q',
/// with exact cosine/Fourier Poisson solve for q'. BiCGStab with a
/// per-component constant-eta Helmholtz preconditioner handles the implicit
/// operator. q is returned as the modified pressure of the direct-force form.
class NsSolver {
 public:
  NsSolver(const Grid2D& grid, const ModelParams& params);
  ~NsSolver();
  NsSolver(NsSolver&&) noexcept;
  NsSolver& operator=(NsSolver&&) noexcept;

  /// `extra_force` (may be null) is added to the momentum right-hand side.
  NsStepResult step(const MacVelocity& v_n, const ScalarField& phi_n, const ScalarField& phi_next,
                    const ScalarField& mu_next, const ScalarField& sigma_n,
                    const NsStepConfig& cfg, const MacVelocity* extra_force = nullptr) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

NsStepResult ns_step(const MacVelocity& v_n, const ScalarField& phi_n, const ScalarField& phi_next,
                     const ScalarField& mu_next, const ScalarField& sigma_n,
                     const NsStepConfig& cfg, const ModelParams& p);

/// p = q - A Psi(phi) - B/2 |grad phi|^2 (face gradients averaged to
/// centers), normalized to mean zero.
ScalarField recover_physical_pressure(const ScalarField& q, const ScalarField& phi,
                                      const ModelParams& p);

/// Inverse of recover_physical_pressure for mean-zero q.
ScalarField modified_pressure(const ScalarField& p_phys, const ScalarField& phi,
                              const ModelParams& p);

}  // namespace nsch
