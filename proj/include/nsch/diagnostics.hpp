#pragma once

#include "nsch/core_model.hpp"
#include "nsch/grid.hpp"

namespace nsch {

/// One row of the energy audit.
struct EnergyReport {
  double t = 0.0;
  double dt = 0.0;
  double E_total = 0.0;
  double E_kinetic = 0.0;
  double E_ginzburg_landau = 0.0;
  double E_chemical = 0.0;
  double D_mu = 0.0;
  double D_sigma = 0.0;
  double D_visc = 0.0;
  double W_sources = 0.0;
  double imbalance = 0.0;
  double mass_phi = 0.0;    // (mean phi+ - mean phi)/dt - mean Gamma
  double mass_sigma = 0.0;  // same for sigma and S
  double div_max = 0.0;
  int krylov_iters = 0;
};

/// Energy terms only (t, E_*); the rates are left zero.
///   E = sum 1/2 |v|^2 + A Psi(phi) + B/2 |grad phi|^2 + 1/2 sigma^2 + chi sigma (1 - phi)
/// with |v|^2 and |grad phi|^2 summed over faces.
EnergyReport total_energy(const ScalarField& phi, const ScalarField& sigma, const MacVelocity& v,
                          const ModelParams& p, double t = 0.0);

struct Dissipation {
  double D_mu = 0.0;     // sum m(phi) |grad mu|^2
  double D_sigma = 0.0;  // sum n(phi) |grad sigma - chi grad phi|^2
  double D_visc = 0.0;   // discrete 2 eta |Dv|^2
  double W_sources = 0.0;  // <mu, Gamma> + <sigma + chi (1 - phi), S>
};

/// Rates evaluated on the given (new-time) fields with the step's sources.
Dissipation dissipation_rates(const ScalarField& phi, const ScalarField& mu,
                              const ScalarField& sigma, const MacVelocity& v,
                              const ScalarField& gamma, const ScalarField& s,
                              const ModelParams& p);

/// (E+ - E)/dt + D_mu + D_sigma + D_visc - W_sources.
double energy_balance_residual(const EnergyReport& report_n, const EnergyReport& report_next,
                               const Dissipation& d, double dt);

struct MassResidual {
  double phi = 0.0;
  double sigma = 0.0;
};

MassResidual mass_balance(const ScalarField& phi_n, const ScalarField& phi_next,
                          const ScalarField& sigma_n, const ScalarField& sigma_next,
                          const ScalarField& gamma, const ScalarField& s, double dt);

double divergence_max(const MacVelocity& v);

struct Health {
  bool finite = true;
  /// dt_cfl / dt; below 1 the advective bound is violated.
  double cfl_margin = 0.0;
  int krylov_iters = 0;
  bool ok() const { return finite && cfl_margin >= 1.0; }
};

Health health(const ScalarField& phi, const ScalarField& sigma, const MacVelocity& v, double dt,
              double cfl_safety, int krylov_iters);

}  // namespace nsch
