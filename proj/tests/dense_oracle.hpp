#pragma once
// Dense assembly of the phase-field and nutrient step systems on small
// no-slip/Neumann grids. Everything is built from the stencil definitions
// directly (no production operator is called), then solved by LU.

#include <Eigen/Dense>

#include "nsch/ch_solver.hpp"
#include "nsch/core_model.hpp"
#include "nsch/grid.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Ops {
  int nx, ny, cells, faces;
  MatrixXd grad;    // faces x cells
  MatrixXd div;     // cells x faces
  MatrixXd interp;  // faces x cells, arithmetic mean (wall faces: adjacent cell)
};

inline Ops build_ops(const nsch::Grid2D& g) {
  Ops o{g.nx, g.ny, g.nx * g.ny, (g.nx + 1) * g.ny + g.nx * (g.ny + 1), {}, {}, {}};
  o.grad = MatrixXd::Zero(o.faces, o.cells);
  o.div = MatrixXd::Zero(o.cells, o.faces);
  o.interp = MatrixXd::Zero(o.faces, o.cells);
  const double hx = g.hx(), hy = g.hy();
  auto cell = [&](int i, int j) { return j * g.nx + i; };
  auto uf = [&](int i, int j) { return j * (g.nx + 1) + i; };
  auto vf = [&](int i, int j) { return (g.nx + 1) * g.ny + j * g.nx + i; };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const int f = uf(i, j);
      if (i > 0 && i < g.nx) {
        o.grad(f, cell(i, j)) = 1.0 / hx;
        o.grad(f, cell(i - 1, j)) = -1.0 / hx;
        o.interp(f, cell(i, j)) = 0.5;
        o.interp(f, cell(i - 1, j)) = 0.5;
      } else {
        o.interp(f, cell(i == 0 ? 0 : g.nx - 1, j)) = 1.0;
      }
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int f = vf(i, j);
      if (j > 0 && j < g.ny) {
        o.grad(f, cell(i, j)) = 1.0 / hy;
        o.grad(f, cell(i, j - 1)) = -1.0 / hy;
        o.interp(f, cell(i, j)) = 0.5;
        o.interp(f, cell(i, j - 1)) = 0.5;
      } else {
        o.interp(f, cell(i, j == 0 ? 0 : g.ny - 1)) = 1.0;
      }
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = cell(i, j);
      o.div(c, uf(i + 1, j)) += 1.0 / hx;
      o.div(c, uf(i, j)) -= 1.0 / hx;
      o.div(c, vf(i, j + 1)) += 1.0 / hy;
      o.div(c, vf(i, j)) -= 1.0 / hy;
    }
  return o;
}

inline VectorXd cells_of(const nsch::ScalarField& f) {
  return Eigen::Map<const VectorXd>(f.raw().data(), static_cast<Eigen::Index>(f.size()));
}

inline VectorXd faces_of(const nsch::MacVelocity& w) {
  VectorXd out(static_cast<Eigen::Index>(w.u_raw().size() + w.v_raw().size()));
  Eigen::Index k = 0;
  for (double x : w.u_raw()) out[k++] = x;
  for (double x : w.v_raw()) out[k++] = x;
  return out;
}

struct ChDense {
  VectorXd phi, mu;
};

/// Coupled (phi+, mu+) system of the stabilized phase-field step, solved
/// directly. Mobility is the two-cell mean of m(phi), plus dt phi_f^2 when
/// `shifted` transport is on.
inline ChDense ch_dense(const nsch::ScalarField& phi, const nsch::ScalarField& sigma,
                        const nsch::MacVelocity& v, const nsch::ScalarField& gamma, double dt,
                        bool shifted, const nsch::ModelParams& p) {
  const Ops o = build_ops(phi.grid());
  const int n = o.cells;
  const VectorXd ph = cells_of(phi), sg = cells_of(sigma), gm = cells_of(gamma);
  VectorXd m_cell(n);
  for (int k = 0; k < n; ++k) m_cell[k] = p.mobility_m(ph[k]);
  const VectorXd phi_f = o.interp * ph;
  VectorXd mob = o.interp * m_cell;
  if (shifted) mob += dt * phi_f.cwiseProduct(phi_f);
  const MatrixXd lm = o.div * mob.asDiagonal() * o.grad;
  const MatrixXd lap = o.div * o.grad;
  const double s = p.potential.stabilization;

  VectorXd g = ph + dt * (gm - o.div * phi_f.cwiseProduct(faces_of(v)));
  if (shifted)
    g += dt * dt * p.chi * (o.div * phi_f.cwiseProduct(phi_f).asDiagonal() * o.grad * sg);
  VectorXd rmu(n);
  for (int k = 0; k < n; ++k)
    rmu[k] = p.A * (nsch::psi_prime(ph[k], p.potential) - s * ph[k]) - p.chi * sg[k];

  MatrixXd big = MatrixXd::Zero(2 * n, 2 * n);
  big.topLeftCorner(n, n) = MatrixXd::Identity(n, n);
  big.topRightCorner(n, n) = -dt * lm;
  big.bottomLeftCorner(n, n) = -p.A * s * MatrixXd::Identity(n, n) + p.B * lap;
  big.bottomRightCorner(n, n) = MatrixXd::Identity(n, n);
  VectorXd rhs(2 * n);
  rhs << g, rmu;
  const VectorXd x = big.fullPivLu().solve(rhs);
  return {x.head(n), x.tail(n)};
}

/// Implicit nutrient step with explicit transport and cross-diffusion.
inline VectorXd sigma_dense(const nsch::ScalarField& sigma, const nsch::ScalarField& phi_next,
                            const nsch::MacVelocity& v, const nsch::ScalarField& s, double dt,
                            const nsch::ModelParams& p) {
  const Ops o = build_ops(sigma.grid());
  const int n = o.cells;
  const VectorXd sg = cells_of(sigma), ph = cells_of(phi_next);
  VectorXd n_cell(n);
  for (int k = 0; k < n; ++k) n_cell[k] = p.mobility_n(ph[k]);
  const VectorXd nf = o.interp * n_cell;
  const MatrixXd ln = o.div * nf.asDiagonal() * o.grad;
  const VectorXd rhs = sg / dt + cells_of(s) - o.div * (o.interp * sg).cwiseProduct(faces_of(v)) -
                       p.chi * ln * ph;
  const MatrixXd a = MatrixXd::Identity(n, n) / dt - ln;
  return a.fullPivLu().solve(rhs);
}

inline double rel_diff(const VectorXd& a, const VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
}

}  // namespace oracle
