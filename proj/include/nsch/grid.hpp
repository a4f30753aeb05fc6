#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nsch {

enum class Boundary {
  NeumannNoSlip,  // mirrored ghosts for scalars, v = 0 on the walls
  Periodic,       // used by manufactured-solution studies
};

/// Uniform cell-centered grid on [0, lx] x [0, ly]. Cell (i, j) has its
/// center at ((i + 1/2) hx, (j + 1/2) hy).
struct Grid2D {
  int nx = 64;
  int ny = 64;
  double lx = 1.0;
  double ly = 1.0;
  Boundary bc = Boundary::NeumannNoSlip;

  Grid2D() = default;
  Grid2D(int nx_, int ny_, double lx_, double ly_, Boundary bc_);

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }
  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }
  bool periodic() const { return bc == Boundary::Periodic; }
  double xc(int i) const { return (i + 0.5) * hx(); }
  double yc(int j) const { return (j + 0.5) * hy(); }

  /// Throws ConfigError unless nx, ny >= 8 and lx, ly > 0.
  void validate() const;

  bool operator==(const Grid2D&) const = default;
};

/// Cell-centered scalar samples, stored row by row (index j * nx + i).
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid2D& grid, double value = 0.0);

  const Grid2D& grid() const { return grid_; }
  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& raw() { return values_; }
  const std::vector<double>& raw() const { return values_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * grid_.nx + i;
  }

  void fill(double value);
  bool all_finite() const;
  double max_abs() const;
  double min() const;
  double max() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Face-centered vector data on the MAC grid: u on the (nx+1) x ny vertical
/// faces, v on the nx x (ny+1) horizontal faces. Used for velocities and for
/// any face quantity (gradients, fluxes, forces). Under periodic bc the last
/// face column (row) duplicates the first and is kept in sync.
class MacVelocity {
 public:
  MacVelocity() = default;
  explicit MacVelocity(const Grid2D& grid, double value = 0.0);

  const Grid2D& grid() const { return grid_; }

  double& u(int i, int j) { return u_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i]; }
  double u(int i, int j) const { return u_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i]; }
  double& v(int i, int j) { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  double v(int i, int j) const { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }

  std::vector<double>& u_raw() { return u_; }
  const std::vector<double>& u_raw() const { return u_; }
  std::vector<double>& v_raw() { return v_; }
  const std::vector<double>& v_raw() const { return v_; }

  /// Copies the first face column/row onto the duplicate last one (periodic
  /// bc) or zeroes the wall-normal components (no-slip).
  void enforce_bc();

  void fill(double value);
  bool all_finite() const;
  double max_abs() const;

  MacVelocity& operator+=(const MacVelocity& o);
  MacVelocity& operator-=(const MacVelocity& o);
  MacVelocity& operator*=(double s);

 private:
  Grid2D grid_;
  std::vector<double> u_;
  std::vector<double> v_;
};

using FaceField = MacVelocity;

MacVelocity operator+(MacVelocity a, const MacVelocity& b);
MacVelocity operator-(MacVelocity a, const MacVelocity& b);
MacVelocity operator*(double s, MacVelocity a);

/// Pair of cell-centered components, e.g. face data averaged to centers.
struct CellVector {
  ScalarField x;
  ScalarField y;
};

}  // namespace nsch
