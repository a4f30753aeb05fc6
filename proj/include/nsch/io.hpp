#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nsch/core_model.hpp"
#include "nsch/grid.hpp"

namespace nsch {

struct SimState;
struct EnergyReport;

/// Values of the snapshot header row `# field,t,nx,ny,Lx,Ly,seed`.
struct SnapshotHeader {
  std::string field;
  double t = 0.0;
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  std::uint64_t seed = 0;
};

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

/// One CSV file per field: the header row, then ny rows of nx values
/// (row j = 0 first), every value printed with round-trip precision.
void write_field_csv(const std::filesystem::path& path, const std::string& field, double t,
                     std::uint64_t seed, const ScalarField& f);

struct FieldFile {
  SnapshotHeader header;
  std::vector<double> values;  // row by row
};

FieldFile read_field_csv(const std::filesystem::path& path);

/// Reads a field file and checks it matches `grid` (cell counts and lengths).
ScalarField read_scalar_field(const std::filesystem::path& path, const Grid2D& grid);

enum class SnapshotFormat { Csv, Vtk };

/// CSV: phi, mu, sigma, q, p (physical pressure), vel_x and vel_y (face
/// velocity averaged to centers), one file each, named <field>_<step>.csv.
/// VTK: a single legacy structured-points ASCII file <prefix>_<step>.vtk with
/// every scalar field plus the cell-centered velocity.
void write_snapshot(const SimState& state, const std::filesystem::path& dir,
                    SnapshotFormat format, const ModelParams& params);

/// Time-series CSV, one row per step plus the initial row.
class SeriesWriter {
 public:
  static constexpr const char* kColumns =
      "t,dt,E_total,E_kin,E_gl,E_chem,D_mu,D_sigma,D_visc,W_sources,imbalance,"
      "mass_phi,mass_sigma,div_max,krylov_iters";

  SeriesWriter() = default;
  /// Truncates and writes the comment + column header, or appends when
  /// `append` is set (checkpoint restart).
  SeriesWriter(const std::filesystem::path& path, std::uint64_t seed,
               const std::string& config_hash, bool append);

  void write_row(const EnergyReport& report);
  bool is_open() const { return out_.is_open(); }
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

/// Exact binary dump of the full state for restart.
void write_checkpoint(const std::filesystem::path& path, const SimState& state);
SimState read_checkpoint(const std::filesystem::path& path);

}  // namespace nsch
