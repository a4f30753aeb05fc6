#include "nsch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsch/error.hpp"

namespace nsch {

Grid2D::Grid2D(int nx_, int ny_, double lx_, double ly_, Boundary bc_)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_), bc(bc_) {}

void Grid2D::validate() const {
  if (nx < 8 || ny < 8)
    throw ConfigError("grid needs at least 8 cells per direction (got " +
                      std::to_string(nx) + " x " + std::to_string(ny) + ")");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw ConfigError("grid lengths must be positive");
}

namespace {

bool finite_span(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs_span(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_same(const Grid2D& a, const Grid2D& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

ScalarField::ScalarField(const Grid2D& grid, double value)
    : grid_(grid), values_(grid.cells(), value) {}

void ScalarField::fill(double value) { std::fill(values_.begin(), values_.end(), value); }
bool ScalarField::all_finite() const { return finite_span(values_); }
double ScalarField::max_abs() const { return max_abs_span(values_); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  check_same(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  check_same(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

MacVelocity::MacVelocity(const Grid2D& grid, double value)
    : grid_(grid),
      u_(static_cast<std::size_t>(grid.nx + 1) * grid.ny, value),
      v_(static_cast<std::size_t>(grid.nx) * (grid.ny + 1), value) {}

void MacVelocity::enforce_bc() {
  const int nx = grid_.nx, ny = grid_.ny;
  if (grid_.periodic()) {
    for (int j = 0; j < ny; ++j) u(nx, j) = u(0, j);
    for (int i = 0; i < nx; ++i) v(i, ny) = v(i, 0);
  } else {
    for (int j = 0; j < ny; ++j) u(0, j) = u(nx, j) = 0.0;
    for (int i = 0; i < nx; ++i) v(i, 0) = v(i, ny) = 0.0;
  }
}

void MacVelocity::fill(double value) {
  std::fill(u_.begin(), u_.end(), value);
  std::fill(v_.begin(), v_.end(), value);
}

bool MacVelocity::all_finite() const { return finite_span(u_) && finite_span(v_); }
double MacVelocity::max_abs() const { return std::max(max_abs_span(u_), max_abs_span(v_)); }

MacVelocity& MacVelocity::operator+=(const MacVelocity& o) {
  check_same(grid_, o.grid_);
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] += o.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

MacVelocity& MacVelocity::operator-=(const MacVelocity& o) {
  check_same(grid_, o.grid_);
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] -= o.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

MacVelocity& MacVelocity::operator*=(double s) {
  for (double& x : u_) x *= s;
  for (double& x : v_) x *= s;
  return *this;
}

MacVelocity operator+(MacVelocity a, const MacVelocity& b) { return a += b; }
MacVelocity operator-(MacVelocity a, const MacVelocity& b) { return a -= b; }
MacVelocity operator*(double s, MacVelocity a) { return a *= s; }

}  // namespace nsch
