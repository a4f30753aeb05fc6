#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nsch/core_model.hpp"
#include "nsch/grid.hpp"
#include "nsch/io.hpp"
#include "nsch/sources.hpp"

namespace nsch {

enum class InitialKind { Uniform, Random, Disk, TanhStrip, File };

/// Initial data. v0 = 0 for every preset.
///   uniform:    phi = phi_value
///   random:     phi = phi_value + amplitude * U(-1, 1), seeded
///   disk:       phi = tanh((radius - r) / (sqrt2 width)), +1 inside
///   tanh-strip: phi = tanh((x - center_x) / (sqrt2 width)), one planar interface
///   file:       phi (and optionally sigma) from snapshot CSV files
/// width = 0 selects the equilibrium thickness sqrt(B/A).
struct InitialSpec {
  InitialKind kind = InitialKind::Uniform;
  double phi_value = 0.0;
  double amplitude = 0.05;
  std::uint64_t seed = 1;
  double radius = 0.25;
  double center_x = 0.5;
  double center_y = 0.5;
  double width = 0.0;
  double sigma_value = 0.0;
  std::string phi_file;
  std::string sigma_file;
};

struct TimeSpec {
  double t_end = 1.0;
  double dt_init = 1e-3;
  double dt_min = 1e-6;
  double dt_max = 1e-2;
  double cfl = 0.5;
};

struct OutputSpec {
  int snapshot_every = 0;  // 0: initial and final snapshots only
  std::string series_path = "series.csv";
  std::string snapshot_dir = "snapshots";
  SnapshotFormat format = SnapshotFormat::Csv;
  int checkpoint_every = 0;
};

struct SolverSpec {
  double krylov_tol = 1e-9;
  int krylov_maxit = 500;
  double poisson_tol = 1e-8;
  bool override_validation = false;
  /// Energy-stable phase/momentum coupling (shifted transport velocity and
  /// potential-form capillary force).
  bool stabilized_coupling = true;
};

/// User-facing description of a coefficient profile.
struct CoeffConfig {
  bool polynomial = false;
  double value = 1.0;
  std::vector<double> coefficients{1.0};
  double lower = 1.0;
  double upper = 1.0;
  CoeffSpec build() const;
};

struct PotentialConfig {
  bool polynomial = false;
  std::vector<double> coefficients{0.25, 0.0, -0.5, 0.0, 0.25};
  GrowthConstants growth;
  double s_max = 2.0;
  double stabilization = 0.0;  // 0: sup Psi'' on the working range
  PotentialSpec build() const;
};

struct SimConfig {
  Grid2D grid;
  ModelParams params;
  SourceSpec sources;
  InitialSpec initial;
  TimeSpec time;
  OutputSpec output;
  SolverSpec solver;

  // Raw inputs from which params is rebuilt by finalize().
  double beta = 0.0;     // with epsilon > 0: A = beta/epsilon, B = beta epsilon
  double epsilon = 0.0;
  PotentialConfig potential;
  CoeffConfig mobility{false, 1e-3, {1e-3}, 1e-3, 1e-3};
  CoeffConfig nutrient_mobility;
  CoeffConfig viscosity{false, 0.1, {0.1}, 0.1, 0.1};

  SimConfig();
  /// Rebuilds params from the raw inputs; call after editing them.
  void finalize();
  /// Structural checks (grid, time, solver, sources); throws ConfigError.
  /// Model hypotheses are checked separately by validate_params.
  void validate() const;
};

/// Parses `section.key = value` lines ('#' starts a comment). Unknown or
/// repeated keys and malformed values are errors naming the line.
SimConfig parse_config(const std::string& text, const std::string& origin = "<config>");
SimConfig load_config(const std::filesystem::path& path);

/// Canonical text: every key in registry order, full precision.
std::string save_config(const SimConfig& cfg);

/// Sets one key (e.g. from a command-line override) and re-finalizes.
void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value);

const std::vector<std::string>& config_keys();

/// Registered key with the smallest edit distance to `key`.
std::string nearest_key(const std::string& key);

/// FNV-1a hash of the canonical text, as 16 hex digits.
std::string config_hash(const SimConfig& cfg);

}  // namespace nsch
