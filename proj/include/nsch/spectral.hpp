#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace nsch {

/// Boundary structure of one direction of a uniform 1D stencil and the real
/// trigonometric transform that diagonalizes its 3-point second difference.
enum class TransformKind {
  Neumann,        // cell centered, mirrored ghosts (DCT-II / DCT-III)
  DirichletNode,  // zero at the nodes 0 and N, N-1 interior unknowns (DST-I)
  DirichletCell,  // cell centered, antisymmetric ghosts (DST-II / DST-III)
  Periodic,       // N points on a ring (real half-complex DFT)
};

/// Diagonalizes separable constant-coefficient operators
///   f(L_x, L_y)  with  L_x = -D_xx, L_y = -D_yy
/// on a tensor grid with per-direction boundary structure. `cells_x` is the
/// number of grid intervals; DirichletNode directions carry cells_x - 1
/// unknowns, all others cells_x. Data are stored row by row (x fastest).
class SpectralSolver {
 public:
  SpectralSolver(int cells_x, TransformKind kind_x, double hx, int cells_y,
                 TransformKind kind_y, double hy);
  ~SpectralSolver();
  SpectralSolver(SpectralSolver&&) noexcept;
  SpectralSolver& operator=(SpectralSolver&&) noexcept;
  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  int points_x() const { return px_; }
  int points_y() const { return py_; }
  std::size_t size() const { return static_cast<std::size_t>(px_) * py_; }

  /// Eigenvalues of -D_xx and -D_yy (non-negative).
  const std::vector<double>& eigen_x() const { return lam_x_; }
  const std::vector<double>& eigen_y() const { return lam_y_; }

  /// Tabulates symbol(lambda_x, lambda_y) in transform order.
  std::vector<double> make_multiplier(const std::function<double(double, double)>& symbol) const;

  /// out = f(L_x, L_y) in for a tabulated multiplier. `in` and `out` may alias.
  void apply(std::span<const double> in, std::span<double> out,
             const std::vector<double>& multiplier) const;

  /// Solves (alpha + beta_x L_x + beta_y L_y) out = in. A zero eigenvalue of
  /// the whole operator (pure Neumann/periodic with alpha = 0) maps the
  /// corresponding mode to zero, i.e. returns the mean-free solution.
  void solve(std::span<const double> in, std::span<double> out, double alpha,
             double beta_x, double beta_y) const;

 private:
  struct Plans;
  int px_ = 0;
  int py_ = 0;
  double norm_ = 1.0;
  std::vector<double> lam_x_;
  std::vector<double> lam_y_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace nsch
