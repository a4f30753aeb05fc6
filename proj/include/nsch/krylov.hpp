#pragma once

#include <functional>
#include <span>

namespace nsch {

/// y = Op(x). Operators must not assume x and y alias.
using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;

struct KrylovResult {
  int iterations = 0;
  double residual = 0.0;           // ||b - A x||_2 (recursive estimate)
  double relative_residual = 0.0;  // residual / ||b||_2
  bool converged = false;
};

/// Preconditioned conjugate gradients for SPD operators. `x` holds the
/// initial guess on entry. Stops when ||r|| <= rel_tol ||b||.
KrylovResult pcg(const LinearOp& a, const LinearOp& precond, std::span<const double> b,
                 std::span<double> x, double rel_tol, int max_iterations);

/// Right-preconditioned BiCGStab for general non-singular operators.
KrylovResult bicgstab(const LinearOp& a, const LinearOp& precond, std::span<const double> b,
                      std::span<double> x, double rel_tol, int max_iterations);

/// Fixed-order Euclidean dot product.
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace nsch
