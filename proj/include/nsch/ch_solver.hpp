#pragma once

#include <memory>

#include "nsch/core_model.hpp"
#include "nsch/grid.hpp"
#include "nsch/krylov.hpp"

namespace nsch {

struct ChStepConfig {
  double dt = 1e-3;
  /// Linear stabilization constant; 0 takes the value certified with the
  /// potential.
  double stabilization = 0.0;
  double krylov_tol = 1e-9;
  int krylov_maxit = 500;
  /// Transports phi with the velocity shifted by the step's own capillary
  /// acceleration, v - dt phi grad(mu + chi sigma). This couples the phase
  /// and momentum updates so the total energy cannot grow for chi = 0;
  /// switching it off gives the plain explicit-convection scheme.
  bool stabilized_convection = true;
};

struct ChStepResult {
  ScalarField phi;
  ScalarField mu;
  KrylovResult krylov;
  /// Set when |phi| exceeded the working range and coefficient arguments
  /// were clamped.
  bool clamped = false;
};

/// mu = A Psi'(phi) - B lap(phi) - chi sigma.
ScalarField chemical_potential(const ScalarField& phi, const ScalarField& sigma,
                               const ModelParams& p);

/// Linearly implicit stabilized step
///   (phi+ - phi)/dt + div(phi u*) = div(m(phi) grad mu+) + Gamma,
///   mu+ = A [Psi'(phi) + S (phi+ - phi)] - B lap(phi+) - chi sigma,
/// with u* = v (or the shifted velocity, see ChStepConfig). Eliminating phi+
/// leaves the SPD system (K^-1 - dt L_M) mu+ = rhs, K = A S - B lap, which is
/// solved by PCG with a spectral preconditioner; phi+ is then recovered from
/// the update equation so the mass balance holds to round-off in the flux.
/// Plans and buffers are reused across steps.
class ChSolver {
 public:
  ChSolver(const Grid2D& grid, const ModelParams& params);
  ~ChSolver();
  ChSolver(ChSolver&&) noexcept;
  ChSolver& operator=(ChSolver&&) noexcept;

  /// Throws StepFailure on non-finite data or Krylov failure.
  ChStepResult step(const ScalarField& phi_n, const ScalarField& sigma_n, const MacVelocity& v_n,
                    const ScalarField& gamma_n, const ChStepConfig& cfg) const;

  /// Face mobility used by step(): m(phi) (+ dt phi_f^2 when stabilized).
  FaceField effective_mobility(const ScalarField& phi_n, const ChStepConfig& cfg) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ChStepResult ch_step(const ScalarField& phi_n, const ScalarField& sigma_n, const MacVelocity& v_n,
                     const ScalarField& gamma_n, const ChStepConfig& cfg, const ModelParams& p);

}  // namespace nsch
