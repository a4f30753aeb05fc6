#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "nsch/config.hpp"
#include "nsch/core_model.hpp"
#include "nsch/grid.hpp"
#include "nsch/simulation.hpp"

namespace nsch {

// ---------------------------------------------------------------------------
// 1D interface profile

/// Steady 1D profile of B phi'' = A Psi'(phi) on [-half_width, half_width]
/// with phi = -1 / +1 at the ends, solved by damped Newton on a uniform grid
/// with a fourth-order second difference.
struct TanhProfile {
  double epsilon = 0.0;
  double beta = 0.0;
  std::vector<double> x;
  std::vector<double> phi;
  int newton_iterations = 0;
  double residual = 0.0;  // max |B phi'' - A Psi'| at convergence
  /// Interfacial energy per unit length, integral of A Psi + B/2 phi'^2.
  double energy = 0.0;
  /// Integral of sqrt(2 Psi) over [-1, 1] for the potential used.
  double potential_constant = 0.0;
  /// energy / potential_constant: the value for a potential normalized so
  /// that this integral is 1 (-> beta as epsilon -> 0).
  double energy_normalized = 0.0;
  /// max |phi - tanh(x / (sqrt2 epsilon))|; meaningful for the quartic.
  double max_error_vs_tanh = 0.0;

  /// Linear interpolation (clamped to the end values outside the grid).
  double sample(double xq) const;
  /// Distance between the points where phi = -0.8 and +0.8.
  double width_10_90() const;
};

TanhProfile tanh_profile_oracle(double epsilon, double beta, int n_points = 40001,
                                const PotentialSpec& potential = PotentialSpec::quartic(),
                                double half_width_in_eps = 20.0);

/// Relaxes the tanh-strip preset (interface initially `width_factor` times
/// too wide) on an nx x ny Neumann grid and compares the mid-row profile with
/// the oracle.
struct StripRelaxation {
  double max_error = 0.0;
  double final_time = 0.0;
  long steps = 0;
};

StripRelaxation strip_relaxation_test(double epsilon = 0.05, int nx = 512, int ny = 8,
                                      double t_end = 1.0, double dt = 1e-3,
                                      double width_factor = 2.0, double mobility = 2e-2);

// ---------------------------------------------------------------------------
// Manufactured solutions (periodic unit square)

struct MmsSetup {
  ModelParams params;
  double t_end = 0.1;
  double krylov_tol = 1e-11;
  MmsSetup();
};

struct MmsExact {
  ScalarField phi;
  ScalarField sigma;
  MacVelocity v;
};

/// Exact fields sampled at cell centers / face centers; v is the discrete
/// curl of the stream function, so it is exactly divergence free.
MmsExact mms_exact(const Grid2D& grid, double t);

/// Residual forcings of the continuum equations for the exact fields at t.
ExtraForcing mms_forcing(const Grid2D& grid, double t, const ModelParams& p);

struct MmsRun {
  int n = 0;
  double dt = 0.0;
  long steps = 0;
  double err_phi = 0.0;
  double err_sigma = 0.0;
  double err_v = 0.0;
  SimState final_state;
};

MmsRun run_mms(int n, double dt, const MmsSetup& setup);

struct ConvergenceRow {
  int n = 0;
  double dt = 0.0;
  double err_phi = 0.0;
  double err_sigma = 0.0;
  double err_v = 0.0;
  double order_phi = 0.0;  // with respect to the previous row (0 for the first)
  double order_sigma = 0.0;
  double order_v = 0.0;
};

struct ConvergenceTable {
  std::string kind;  // "spatial" or "temporal"
  std::vector<ConvergenceRow> rows;
  void write_csv(std::ostream& out) const;
  void print(std::ostream& out) const;
};

/// Spatial study: dt = dt_factor h^2 (rounded to land on t_end).
ConvergenceTable manufactured_solution_study(const std::vector<int>& resolutions,
                                             double dt_factor = 1.0,
                                             const MmsSetup& setup = MmsSetup());

/// Temporal study at fixed n: errors of consecutive dt halvings against each
/// other (self-convergence), which removes the fixed spatial error. Row k
/// holds |u(dt_k) - u(dt_{k+1})|.
ConvergenceTable manufactured_temporal_study(int n, const std::vector<double>& dts,
                                             const MmsSetup& setup = MmsSetup());

// ---------------------------------------------------------------------------
// Variational consistency of mu

struct VariationalCheck {
  double max_relative_error = 0.0;
  int cells_checked = 0;
};

/// Compares chemical_potential with centered differences (step `step`) of a
/// separately coded discrete energy, perturbing `n_cells` random cells one at
/// a time. Relative errors use max(|mu_k|, 1e-3 max|mu|) as denominator.
VariationalCheck variational_gradient_check(const ScalarField& phi, const ScalarField& sigma,
                                            const ModelParams& p, int n_cells = 200,
                                            std::uint64_t seed = 7, double step = 1e-5);

// ---------------------------------------------------------------------------
// Continuous dependence

struct PerturbationReport {
  std::vector<double> delta0;
  std::vector<double> d_initial;  // squared initial distance
  std::vector<double> d_final;    // d(T) with sup and time-integrated parts
  std::vector<double> growth;     // d_final / d_initial
  double slope = 0.0;             // log-log slope of d_final against d_initial
  bool finite = true;
};

/// Runs the base configuration and, in lockstep, copies with phi, sigma and v
/// each perturbed by delta0 times a smooth unit-L2 field (v divergence free
/// and zero on the walls). d collects sup_t (|dphi|^2 + |dv|^2 + |dsigma|^2)
/// plus the time integrals of |dmu|^2, |grad dsigma|^2, |grad dv|^2 and
/// |dphi|_{H2}^2. Fixed dt.
PerturbationReport perturbation_growth_test(const SimConfig& base,
                                            const std::vector<double>& delta0, double t_end,
                                            double dt);

/// Same distance for trajectories that differ only by an extra mass source
/// amplitude * (unit smooth field) added to Gamma.
std::vector<double> source_perturbation_sweep(const SimConfig& base,
                                              const std::vector<double>& amplitudes,
                                              double t_end, double dt);

/// Default configuration of the continuous-dependence study: 64^2 disk,
/// chi = 0.25, proliferation sources, sigma0 = 1.
SimConfig perturbation_base_config();

// ---------------------------------------------------------------------------
// Energy audit

struct EnergyStudyRow {
  double dt = 0.0;
  long steps = 0;
  double final_imbalance = 0.0;
  double max_abs_imbalance = 0.0;
  double max_mass_phi = 0.0;
  double max_mass_sigma = 0.0;
  double max_div_ratio = 0.0;  // max over steps of div_max / (1e-8 max|v| + 1e-12)
  double max_energy_increase = 0.0;  // max (E_{n+1} - E_n) / E_0
};

struct EnergyStudy {
  std::vector<EnergyStudyRow> rows;
  double slope = 0.0;  // log-log slope of |final imbalance| against dt
  void print(std::ostream& out) const;
};

/// Runs `base` with each fixed dt to t_end and audits every step.
EnergyStudy energy_residual_study(const SimConfig& base, const std::vector<double>& dts,
                                  double t_end);

/// Audit of a single fixed-dt trajectory.
EnergyStudyRow audit_trajectory(const SimConfig& cfg, double dt, double t_end);

/// Default configurations: 128^2 Neumann, beta = 1, epsilon = 0.02.
/// dissipation: chi = 0, no sources, random phi0; identity: chi = 0.25,
/// proliferation sources, disk, sigma0 = 1.
SimConfig energy_dissipation_config();
SimConfig energy_identity_config();

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nsch
