#include "nsch/diagnostics.hpp"

#include <algorithm>
#include <limits>

#include "nsch/grid_ops.hpp"
#include "nsch/ns_solver.hpp"

namespace nsch {

EnergyReport total_energy(const ScalarField& phi, const ScalarField& sigma, const MacVelocity& v,
                          const ModelParams& p, double t) {
  EnergyReport r;
  r.t = t;
  r.E_kinetic = 0.5 * face_inner(v, v);
  const FaceField gp = gradient_cc_to_face(phi);
  double bulk = 0.0, chem = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    bulk += psi(phi[k], p.potential);
    chem += chemical_free_energy(phi[k], sigma[k], p.chi).n;
  }
  const double area = phi.grid().cell_area();
  r.E_ginzburg_landau = p.A * bulk * area + 0.5 * p.B * face_inner(gp, gp);
  r.E_chemical = chem * area;
  r.E_total = r.E_kinetic + r.E_ginzburg_landau + r.E_chemical;
  return r;
}

Dissipation dissipation_rates(const ScalarField& phi, const ScalarField& mu,
                              const ScalarField& sigma, const MacVelocity& v,
                              const ScalarField& gamma, const ScalarField& s,
                              const ModelParams& p) {
  Dissipation d;
  const double s_max = p.potential.s_max;
  const FaceField mf = face_coefficient(phi, p.mobility_m, s_max);
  const FaceField nf = face_coefficient(phi, p.mobility_n, s_max);
  const FaceField gmu = gradient_cc_to_face(mu);
  d.D_mu = face_inner(face_product(mf, gmu), gmu);
  const FaceField gn = gradient_cc_to_face(sigma) - p.chi * gradient_cc_to_face(phi);
  d.D_sigma = face_inner(face_product(nf, gn), gn);
  d.D_visc = viscous_dissipation(v, phi, p);
  ScalarField n_sigma(phi.grid());
  for (std::size_t k = 0; k < phi.size(); ++k)
    n_sigma[k] = chemical_free_energy(phi[k], sigma[k], p.chi).n_sigma;
  d.W_sources = cell_inner(mu, gamma) + cell_inner(n_sigma, s);
  return d;
}

double energy_balance_residual(const EnergyReport& report_n, const EnergyReport& report_next,
                               const Dissipation& d, double dt) {
  return (report_next.E_total - report_n.E_total) / dt + d.D_mu + d.D_sigma + d.D_visc -
         d.W_sources;
}

MassResidual mass_balance(const ScalarField& phi_n, const ScalarField& phi_next,
                          const ScalarField& sigma_n, const ScalarField& sigma_next,
                          const ScalarField& gamma, const ScalarField& s, double dt) {
  MassResidual r;
  r.phi = (mean(phi_next) - mean(phi_n)) / dt - mean(gamma);
  r.sigma = (mean(sigma_next) - mean(sigma_n)) / dt - mean(s);
  return r;
}

Health health(const ScalarField& phi, const ScalarField& sigma, const MacVelocity& v, double dt,
              double cfl_safety, int krylov_iters) {
  Health h;
  h.finite = phi.all_finite() && sigma.all_finite() && v.all_finite();
  h.krylov_iters = krylov_iters;
  const Grid2D& g = v.grid();
  const double vmax = v.max_abs();
  const double dt_cfl = vmax > 0.0 ? cfl_safety * std::min(g.hx(), g.hy()) / vmax
                                   : std::numeric_limits<double>::infinity();
  h.cfl_margin = dt_cfl / dt;
  return h;
}

}  // namespace nsch
