#include "nsch/ns_solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nsch/error.hpp"
#include "nsch/grid_ops.hpp"
#include "nsch/spectral.hpp"

namespace nsch {
namespace {

// Periodic index wrap.
inline int wrap(int i, int n) { return i < 0 ? i + n : (i >= n ? i - n : i); }

// Cell viscosity and its corner average. Corners are indexed (i, j) in
// [0, nx] x [0, ny]; wall corners average the existing neighbours.
struct Viscosity {
  ScalarField cell;
  std::vector<double> corner;
  int nx = 0;
  double at(int i, int j) const { return corner[static_cast<std::size_t>(j) * (nx + 1) + i]; }
};

Viscosity viscosity_field(const ScalarField& phi, const ModelParams& p) {
  const Grid2D& g = phi.grid();
  const double s_max = p.potential.s_max;
  Viscosity eta;
  eta.cell = map_cells(phi, [&](double s) { return p.viscosity_eta(std::clamp(s, -s_max, s_max)); });
  eta.nx = g.nx;
  eta.corner.assign(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1), 0.0);
  const bool per = g.periodic();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      double acc = 0.0;
      int count = 0;
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          int ci = i + di, cj = j + dj;
          if (per) {
            ci = wrap(ci, g.nx);
            cj = wrap(cj, g.ny);
          } else if (ci < 0 || ci >= g.nx || cj < 0 || cj >= g.ny) {
            continue;
          }
          acc += eta.cell(ci, cj);
          ++count;
        }
      eta.corner[static_cast<std::size_t>(j) * (g.nx + 1) + i] = acc / count;
    }
  return eta;
}

// Strain pieces: normal rates at cells, shear rate dy u + dx v at corners.
struct Strain {
  ScalarField exx, eyy;
  std::vector<double> shear;
};

void strain_rates_into(const MacVelocity& w, Strain& s) {
  const Grid2D& g = w.grid();
  const int nx = g.nx, ny = g.ny;
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  const bool per = g.periodic();
  if (s.exx.size() != g.cells() || !(s.exx.grid() == g)) {
    s.exx = ScalarField(g);
    s.eyy = ScalarField(g);
  }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      s.exx(i, j) = (w.u(i + 1, j) - w.u(i, j)) * ihx;
      s.eyy(i, j) = (w.v(i, j + 1) - w.v(i, j)) * ihy;
    }
  s.shear.resize(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      double dyu = 0.0, dxv = 0.0;
      if (per) {
        const int iw = wrap(i, nx), jw = wrap(j, ny);
        dyu = (w.u(iw, jw) - w.u(iw, wrap(j - 1, ny))) * ihy;
        dxv = (w.v(iw, jw) - w.v(wrap(i - 1, nx), jw)) * ihx;
      } else {
        if (i > 0 && i < nx) {
          if (j == 0) dyu = 2.0 * w.u(i, 0) * ihy;
          else if (j == ny) dyu = -2.0 * w.u(i, ny - 1) * ihy;
          else dyu = (w.u(i, j) - w.u(i, j - 1)) * ihy;
        }
        if (j > 0 && j < ny) {
          if (i == 0) dxv = 2.0 * w.v(0, j) * ihx;
          else if (i == nx) dxv = -2.0 * w.v(nx - 1, j) * ihx;
          else dxv = (w.v(i, j) - w.v(i - 1, j)) * ihx;
        }
      }
      s.shear[static_cast<std::size_t>(j) * (nx + 1) + i] = dyu + dxv;
    }
}

Strain strain_rates(const MacVelocity& w) {
  Strain s;
  strain_rates_into(w, s);
  return s;
}

// Unknown layout: interior u faces then interior v faces (walls), or the
// non-duplicate faces (periodic). Matches the spectral preconditioner order.
struct Layout {
  int ux0, ux1, vy0, vy1;  // index ranges [ux0, ux1) for u's i, [vy0, vy1) for v's j
  int nx, ny;
  std::size_t nu() const { return static_cast<std::size_t>(ux1 - ux0) * ny; }
  std::size_t nv() const { return static_cast<std::size_t>(vy1 - vy0) * nx; }
  std::size_t size() const { return nu() + nv(); }

  explicit Layout(const Grid2D& g)
      : ux0(g.periodic() ? 0 : 1),
        ux1(g.nx),
        vy0(g.periodic() ? 0 : 1),
        vy1(g.ny),
        nx(g.nx),
        ny(g.ny) {}

  void pack(const MacVelocity& w, std::span<double> x) const {
    const int pu = ux1 - ux0;
    for (int j = 0; j < ny; ++j)
      for (int i = ux0; i < ux1; ++i) x[static_cast<std::size_t>(j) * pu + (i - ux0)] = w.u(i, j);
    const std::size_t off = nu();
    for (int j = vy0; j < vy1; ++j)
      for (int i = 0; i < nx; ++i) x[off + static_cast<std::size_t>(j - vy0) * nx + i] = w.v(i, j);
  }

  void unpack(std::span<const double> x, MacVelocity& w) const {
    const int pu = ux1 - ux0;
    for (int j = 0; j < ny; ++j)
      for (int i = ux0; i < ux1; ++i) w.u(i, j) = x[static_cast<std::size_t>(j) * pu + (i - ux0)];
    const std::size_t off = nu();
    for (int j = vy0; j < vy1; ++j)
      for (int i = 0; i < nx; ++i) w.v(i, j) = x[off + static_cast<std::size_t>(j - vy0) * nx + i];
    w.enforce_bc();
  }
};

TransformKind scalar_kind(const Grid2D& g) {
  return g.periodic() ? TransformKind::Periodic : TransformKind::Neumann;
}

}  // namespace

FaceField korteweg_force(const ScalarField& mu, const ScalarField& sigma, const ScalarField& phi,
                         double chi) {
  const ScalarField pot = mu + chi * sigma;
  FaceField f = face_product(interpolate_cc_to_face(pot), gradient_cc_to_face(phi));
  f.enforce_bc();
  return f;
}

FaceField capillary_force_potential(const ScalarField& mu, const ScalarField& sigma,
                                    const ScalarField& phi, double chi) {
  const ScalarField pot = mu + chi * sigma;
  FaceField f = -1.0 * face_product(interpolate_cc_to_face(phi), gradient_cc_to_face(pot));
  f.enforce_bc();
  return f;
}

namespace {

// Writes C(a) w into the interior faces of `out` (boundary faces untouched).
// Neighbour indices and wall masks are tabulated so the inner loops are
// branch free.
void convection_into(const MacVelocity& a, const MacVelocity& w, MacVelocity& out) {
  const Grid2D& g = w.grid();
  const int nx = g.nx, ny = g.ny;
  const double ihx = 0.25 / g.hx(), ihy = 0.25 / g.hy();
  const bool per = g.periodic();
  std::vector<int> prev_x(nx + 1), next_x(nx + 1), prev_y(ny + 1), next_y(ny + 1);
  std::vector<double> open_e(nx + 1), open_w(nx + 1), open_n(ny + 1), open_s(ny + 1);
  for (int i = 0; i <= nx; ++i) {
    prev_x[i] = per ? wrap(i - 1, nx) : std::max(i - 1, 0);
    next_x[i] = per ? wrap(i + 1, nx) : std::min(i + 1, nx - 1);
    open_e[i] = per || i < nx - 1 ? 1.0 : 0.0;
    open_w[i] = per || i > 0 ? 1.0 : 0.0;
  }
  for (int j = 0; j <= ny; ++j) {
    prev_y[j] = per ? wrap(j - 1, ny) : std::max(j - 1, 0);
    next_y[j] = per ? wrap(j + 1, ny) : std::min(j + 1, ny - 1);
    open_n[j] = per || j < ny - 1 ? 1.0 : 0.0;
    open_s[j] = per || j > 0 ? 1.0 : 0.0;
  }
  const int u0 = per ? 0 : 1;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const int jn = next_y[j], js = prev_y[j];
    const double on = open_n[j], os = open_s[j];
    for (int i = u0; i < nx; ++i) {
      const int im = prev_x[i];  // cell left of the face
      const double fe = a.u(i, j) + a.u(i + 1, j);
      const double fw = a.u(im, j) + a.u(i, j);
      const double fn = on * (a.v(im, j + 1) + a.v(i, j + 1));
      const double fs = os * (a.v(im, j) + a.v(i, j));
      const double wc = w.u(i, j);
      out.u(i, j) = (fe * (wc + w.u(i + 1, j)) - fw * (w.u(im, j) + wc)) * ihx +
                    (fn * (wc + w.u(i, jn)) - fs * (w.u(i, js) + wc)) * ihy;
    }
  }
  const int v0 = per ? 0 : 1;
#pragma omp parallel for schedule(static)
  for (int j = v0; j < ny; ++j) {
    const int jm = prev_y[j];  // cell below the face
    for (int i = 0; i < nx; ++i) {
      const double fn = a.v(i, j) + a.v(i, j + 1);
      const double fs = a.v(i, jm) + a.v(i, j);
      const double fe = open_e[i] * (a.u(i + 1, jm) + a.u(i + 1, j));
      const double fw = open_w[i] * (a.u(i, jm) + a.u(i, j));
      const double wc = w.v(i, j);
      out.v(i, j) = (fn * (wc + w.v(i, j + 1)) - fs * (w.v(i, jm) + wc)) * ihy +
                    (fe * (wc + w.v(next_x[i], j)) - fw * (w.v(prev_x[i], j) + wc)) * ihx;
    }
  }
}

}  // namespace

MacVelocity convection_operator(const MacVelocity& a, const MacVelocity& w) {
  MacVelocity out(w.grid());
  convection_into(a, w, out);
  out.enforce_bc();
  return out;
}

namespace {

// Writes div(2 eta D w) into the interior faces of `out`; `s` is scratch and
// holds the strain rates of w afterwards.
void viscous_into(const MacVelocity& w, const Viscosity& eta, Strain& s, MacVelocity& out) {
  const Grid2D& g = w.grid();
  const int nx = g.nx, ny = g.ny;
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  const bool per = g.periodic();
  strain_rates_into(w, s);
  // Stresses overwrite the strain rates in place.
  for (std::size_t k = 0; k < s.exx.size(); ++k) {
    s.exx[k] *= 2.0 * eta.cell[k];
    s.eyy[k] *= 2.0 * eta.cell[k];
  }
  for (std::size_t k = 0; k < s.shear.size(); ++k) s.shear[k] *= eta.corner[k];
  const ScalarField& txx = s.exx;
  const ScalarField& tyy = s.eyy;
  const std::vector<double>& txy = s.shear;
  auto c = [&](int i, int j) { return txy[static_cast<std::size_t>(j) * (nx + 1) + i]; };

  const int u0 = per ? 0 : 1;
  for (int j = 0; j < ny; ++j)
    for (int i = u0; i < nx; ++i) {
      const int im = per ? wrap(i - 1, nx) : i - 1;
      out.u(i, j) = (txx(i, j) - txx(im, j)) * ihx + (c(i, j + 1) - c(i, j)) * ihy;
    }
  const int v0 = per ? 0 : 1;
  for (int j = v0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int jm = per ? wrap(j - 1, ny) : j - 1;
      out.v(i, j) = (c(i + 1, j) - c(i, j)) * ihx + (tyy(i, j) - tyy(i, jm)) * ihy;
    }
}

MacVelocity viscous_apply(const MacVelocity& w, const Viscosity& eta) {
  Strain s;
  MacVelocity out(w.grid());
  viscous_into(w, eta, s, out);
  out.enforce_bc();
  return out;
}

}  // namespace

MacVelocity viscous_operator(const MacVelocity& w, const ScalarField& phi, const ModelParams& p) {
  return viscous_apply(w, viscosity_field(phi, p));
}

double viscous_dissipation(const MacVelocity& w, const ScalarField& phi, const ModelParams& p) {
  const Grid2D& g = w.grid();
  const Viscosity eta = viscosity_field(phi, p);
  const Strain s = strain_rates(w);
  double acc = 0.0;
  for (std::size_t k = 0; k < s.exx.size(); ++k)
    acc += 2.0 * eta.cell[k] * (s.exx[k] * s.exx[k] + s.eyy[k] * s.eyy[k]);
  const bool per = g.periodic();
  const int imax = per ? g.nx - 1 : g.nx, jmax = per ? g.ny - 1 : g.ny;
  for (int j = 0; j <= jmax; ++j)
    for (int i = 0; i <= imax; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * (g.nx + 1) + i;
      const bool wall = !per && (i == 0 || i == g.nx || j == 0 || j == g.ny);
      acc += (wall ? 0.5 : 1.0) * eta.corner[k] * s.shear[k] * s.shear[k];
    }
  return acc * g.cell_area();
}

MacVelocity project(const MacVelocity& w, ScalarField* q_out) {
  const Grid2D& g = w.grid();
  SpectralSolver sp(g.nx, scalar_kind(g), g.hx(), g.ny, scalar_kind(g), g.hy());
  ScalarField rhs = divergence_face_to_cc(w);
  ScalarField q(g);
  rhs *= -1.0;
  sp.solve(rhs.values(), q.values(), 0.0, 1.0, 1.0);
  MacVelocity out = w - gradient_cc_to_face(q);
  out.enforce_bc();
  if (q_out) *q_out = std::move(q);
  return out;
}

struct NsSolver::Impl {
  Grid2D grid;
  ModelParams params;
  SpectralSolver poisson;
  SpectralSolver helm_u;
  SpectralSolver helm_v;

  static TransformKind along(const Grid2D& g, bool normal) {
    if (g.periodic()) return TransformKind::Periodic;
    return normal ? TransformKind::DirichletNode : TransformKind::DirichletCell;
  }

  Impl(const Grid2D& g, const ModelParams& p)
      : grid(g),
        params(p),
        poisson(g.nx, scalar_kind(g), g.hx(), g.ny, scalar_kind(g), g.hy()),
        helm_u(g.nx, along(g, true), g.hx(), g.ny, along(g, false), g.hy()),
        helm_v(g.nx, along(g, false), g.hx(), g.ny, along(g, true), g.hy()) {}
};

NsSolver::NsSolver(const Grid2D& grid, const ModelParams& params)
    : impl_(std::make_unique<Impl>(grid, params)) {}
NsSolver::~NsSolver() = default;
NsSolver::NsSolver(NsSolver&&) noexcept = default;
NsSolver& NsSolver::operator=(NsSolver&&) noexcept = default;

NsStepResult NsSolver::step(const MacVelocity& v_n, const ScalarField& phi_n,
                            const ScalarField& phi_next, const ScalarField& mu_next,
                            const ScalarField& sigma_n, const NsStepConfig& cfg,
                            const MacVelocity* extra_force) const {
  const Grid2D& g = impl_->grid;
  const ModelParams& p = impl_->params;
  const double dt = cfg.dt;
  if (!(dt > 0.0)) throw StepFailure("ns_step: dt must be positive", 0.0);
  if (!v_n.all_finite() || !phi_n.all_finite() || !phi_next.all_finite() ||
      !mu_next.all_finite() || !sigma_n.all_finite())
    throw StepFailure("ns_step: non-finite input", 0.0);

  const FaceField force = cfg.potential_form
                              ? capillary_force_potential(mu_next, sigma_n, phi_n, p.chi)
                              : korteweg_force(mu_next, sigma_n, phi_next, p.chi);
  MacVelocity rhs_field = (1.0 / dt) * v_n + force;
  if (extra_force) rhs_field += *extra_force;
  rhs_field.enforce_bc();

  const Viscosity eta = viscosity_field(phi_next, p);
  const Layout lay(g);
  const std::size_t n = lay.size();
  std::vector<double> b(n), x(n);
  lay.pack(rhs_field, b);
  lay.pack(v_n, x);

  MacVelocity wx(g), conv(g), visc(g);
  Strain scratch;
  std::vector<double> packed(n);
  const double idt = 1.0 / dt;
  LinearOp op = [&](std::span<const double> in, std::span<double> out) {
    lay.unpack(in, wx);
    convection_into(v_n, wx, conv);
    viscous_into(wx, eta, scratch, visc);
    lay.pack(conv, out);
    lay.pack(visc, packed);
    for (std::size_t k = 0; k < n; ++k) out[k] += idt * in[k] - packed[k];
  };
  const double eta_bar = mean(eta.cell);
  const SpectralSolver& hu = impl_->helm_u;
  const SpectralSolver& hv = impl_->helm_v;
  LinearOp pre = [&](std::span<const double> in, std::span<double> out) {
    const std::size_t nu = lay.nu();
    hu.solve(in.subspan(0, nu), out.subspan(0, nu), 1.0 / dt, 2.0 * eta_bar, eta_bar);
    hv.solve(in.subspan(nu), out.subspan(nu), 1.0 / dt, eta_bar, 2.0 * eta_bar);
  };

  NsStepResult res;
  res.krylov = bicgstab(op, pre, b, x, cfg.krylov_tol, cfg.krylov_maxit);
  if (!res.krylov.converged)
    throw StepFailure("ns_step: BiCGStab did not converge", res.krylov.relative_residual);

  MacVelocity tilde(g);
  lay.unpack(x, tilde);

  ScalarField rhs = divergence_face_to_cc(tilde);
  rhs *= -1.0 / dt;
  ScalarField qp(g);
  impl_->poisson.solve(rhs.values(), qp.values(), 0.0, 1.0, 1.0);
  res.v = tilde - dt * gradient_cc_to_face(qp);
  res.v.enforce_bc();
  if (!res.v.all_finite()) throw StepFailure("ns_step: non-finite velocity", 0.0);

  res.div_max = divergence_max(res.v);
  if (res.div_max > cfg.poisson_tol * std::max(1.0, res.v.max_abs()))
    throw StepFailure("ns_step: projection left divergence", res.div_max);

  if (cfg.potential_form) {
    for (std::size_t k = 0; k < qp.size(); ++k)
      qp[k] += phi_n[k] * (mu_next[k] + p.chi * sigma_n[k]);
  }
  const double m = mean(qp);
  for (double& val : qp.raw()) val -= m;
  res.q = std::move(qp);
  return res;
}

NsStepResult ns_step(const MacVelocity& v_n, const ScalarField& phi_n, const ScalarField& phi_next,
                     const ScalarField& mu_next, const ScalarField& sigma_n,
                     const NsStepConfig& cfg, const ModelParams& p) {
  return NsSolver(v_n.grid(), p).step(v_n, phi_n, phi_next, mu_next, sigma_n, cfg);
}

namespace {

ScalarField capillary_shift(const ScalarField& phi, const ModelParams& p) {
  const CellVector gc = face_to_cc(gradient_cc_to_face(phi));
  ScalarField out(phi.grid());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = p.A * psi(phi[k], p.potential) +
             0.5 * p.B * (gc.x[k] * gc.x[k] + gc.y[k] * gc.y[k]);
  return out;
}

}  // namespace

ScalarField recover_physical_pressure(const ScalarField& q, const ScalarField& phi,
                                      const ModelParams& p) {
  ScalarField out = q - capillary_shift(phi, p);
  const double m = mean(out);
  for (double& v : out.raw()) v -= m;
  return out;
}

ScalarField modified_pressure(const ScalarField& p_phys, const ScalarField& phi,
                              const ModelParams& p) {
  ScalarField out = p_phys + capillary_shift(phi, p);
  const double m = mean(out);
  for (double& v : out.raw()) v -= m;
  return out;
}

}  // namespace nsch
