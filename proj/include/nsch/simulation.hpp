#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "nsch/ch_solver.hpp"
#include "nsch/config.hpp"
#include "nsch/ns_solver.hpp"
#include "nsch/nutrient_solver.hpp"
#include "nsch/sources.hpp"
#include "nsch/state.hpp"

namespace nsch {

/// Additional right-hand sides (manufactured-solution forcing, source
/// perturbations): phi is added to Gamma, sigma to S, v to the momentum
/// equation.
struct ExtraForcing {
  ScalarField phi;
  ScalarField sigma;
  MacVelocity v;
};

/// One full time step: sources -> phase field -> nutrient -> momentum ->
/// energy audit. Solvers and transform plans are built once.
class Stepper {
 public:
  Stepper(const Grid2D& grid, const ModelParams& params, const SourceSpec& sources,
          const SolverSpec& solver, const PrescribedSources* prescribed = nullptr);
  explicit Stepper(const SimConfig& cfg, const PrescribedSources* prescribed = nullptr);

  /// Advances `state` by dt and returns the audit row (also stored in
  /// state.last). The state is untouched when a StepFailure is thrown.
  EnergyReport advance(SimState& state, double dt, const ExtraForcing* extra = nullptr) const;

  const ModelParams& params() const { return params_; }

 private:
  Grid2D grid_;
  ModelParams params_;
  SourceSpec sources_;
  SolverSpec solver_;
  const PrescribedSources* prescribed_;
  ChSolver ch_;
  NutrientSolver nutrient_;
  NsSolver ns_;
};

/// Initial state from the configured preset, with mu consistent, v = q = 0
/// and state.last holding the energy at t = 0.
SimState initial_state(const SimConfig& cfg);

/// Energy terms of `state` with t set; rates zero.
EnergyReport initial_report(const SimState& state, const ModelParams& p);

/// Next step size: min of the growth-limited previous step, the advective
/// bound cfl h / max|v| and the cross-diffusion bound 0.25 h^2 / (chi n_max),
/// clamped to [dt_min, dt_max] and shortened to land on t_end.
double next_dt(const SimConfig& cfg, const SimState& state, double dt_prev);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<double> until;
  std::optional<std::uint64_t> seed;
  std::filesystem::path restart;  // checkpoint to resume from (empty: fresh start)
  bool verbose = false;
};

struct RunReport {
  long steps = 0;
  double t_final = 0.0;
  int retries = 0;
  bool aborted = false;
  std::string message;
  double wall_seconds = 0.0;
  std::filesystem::path series_path;
};

/// Runs the configured simulation, writing the series CSV, snapshots,
/// checkpoints and manifest.json under out_dir. A step that still fails
/// after five halvings aborts the run with a checkpoint
/// (abort_checkpoint.bin); the report then has aborted = true.
RunReport run_simulation(const SimConfig& cfg, const RunOptions& options);

/// Version string recorded in manifests.
std::string version_string();

}  // namespace nsch
