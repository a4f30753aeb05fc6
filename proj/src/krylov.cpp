#include "nsch/krylov.hpp"

#include <cmath>
#include <vector>

namespace nsch {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

KrylovResult pcg(const LinearOp& a, const LinearOp& precond, std::span<const double> b,
                 std::span<double> x, double rel_tol, int max_iterations) {
  const std::size_t n = b.size();
  KrylovResult res;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    for (double& v : x) v = 0.0;
    res.converged = true;
    return res;
  }
  std::vector<double> r(n), z(n), p(n), ap(n);
  a(x, ap);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
  double rnorm = std::sqrt(dot(r, r));
  const double target = rel_tol * bnorm;
  if (rnorm <= target) {
    res.residual = rnorm;
    res.relative_residual = rnorm / bnorm;
    res.converged = true;
    return res;
  }
  precond(r, z);
  p = z;
  double rz = dot(r, z);
  int it = 0;
  while (it < max_iterations) {
    ++it;
    a(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0) || !std::isfinite(pap)) break;
    const double alpha = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    rnorm = std::sqrt(dot(r, r));
    if (rnorm <= target) {
      res.converged = true;
      break;
    }
    precond(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  res.iterations = it;
  res.residual = rnorm;
  res.relative_residual = rnorm / bnorm;
  return res;
}

KrylovResult bicgstab(const LinearOp& a, const LinearOp& precond, std::span<const double> b,
                      std::span<double> x, double rel_tol, int max_iterations) {
  const std::size_t n = b.size();
  KrylovResult res;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    for (double& v : x) v = 0.0;
    res.converged = true;
    return res;
  }
  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), y(n), zz(n);
  a(x, t);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - t[k];
  rhat = r;
  double rnorm = std::sqrt(dot(r, r));
  const double target = rel_tol * bnorm;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int it = 0;
  if (rnorm <= target) res.converged = true;
  while (!res.converged && it < max_iterations) {
    ++it;
    const double rho_new = dot(rhat, r);
    if (rho_new == 0.0 || !std::isfinite(rho_new)) break;
    if (it == 1) {
      p = r;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
    }
    rho = rho_new;
    precond(p, y);
    a(y, v);
    const double rv = dot(rhat, v);
    if (rv == 0.0 || !std::isfinite(rv)) break;
    alpha = rho / rv;
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = r[k] - alpha * v[k];
      x[k] += alpha * y[k];
    }
    const double snorm = std::sqrt(dot(s, s));
    if (snorm <= target) {
      r = s;
      rnorm = snorm;
      res.converged = true;
      break;
    }
    precond(s, zz);
    a(zz, t);
    const double tt = dot(t, t);
    if (tt == 0.0 || !std::isfinite(tt)) break;
    omega = dot(t, s) / tt;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += omega * zz[k];
      r[k] = s[k] - omega * t[k];
    }
    rnorm = std::sqrt(dot(r, r));
    if (rnorm <= target) {
      res.converged = true;
      break;
    }
    if (omega == 0.0) break;
  }
  res.iterations = it;
  res.residual = rnorm;
  res.relative_residual = rnorm / bnorm;
  return res;
}

}  // namespace nsch
