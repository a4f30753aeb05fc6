#include "nsch/verification.hpp"

#include <Eigen/SparseLU>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <stdexcept>

#include "nsch/ch_solver.hpp"
#include "nsch/error.hpp"
#include "nsch/grid_ops.hpp"
#include "nsch/io.hpp"

namespace nsch {

// ---------------------------------------------------------------------------
// 1D profile

double TanhProfile::sample(double xq) const {
  if (x.empty()) return 0.0;
  if (xq <= x.front()) return phi.front();
  if (xq >= x.back()) return phi.back();
  const double h = x[1] - x[0];
  const auto k = std::min(static_cast<std::size_t>((xq - x.front()) / h), x.size() - 2);
  const double w = (xq - x[k]) / h;
  return (1.0 - w) * phi[k] + w * phi[k + 1];
}

double TanhProfile::width_10_90() const {
  auto crossing = [&](double level) {
    for (std::size_t k = 0; k + 1 < phi.size(); ++k)
      if (phi[k] <= level && phi[k + 1] > level)
        return x[k] + (level - phi[k]) / (phi[k + 1] - phi[k]) * (x[k + 1] - x[k]);
    return std::nan("");
  };
  return crossing(0.8) - crossing(-0.8);
}

TanhProfile tanh_profile_oracle(double epsilon, double beta, int n_points,
                                const PotentialSpec& pot, double half_width_in_eps) {
  if (!(epsilon > 0.0) || !(beta > 0.0)) throw ConfigError("epsilon and beta must be positive");
  if (n_points < 11 || n_points % 2 == 0) throw ConfigError("n_points must be odd and >= 11");
  const InterfaceScaling sc = epsilon_beta_map(beta, epsilon);
  const double a = sc.A, b = sc.B;
  const int n = n_points;
  const int mid = n / 2;
  const double half = half_width_in_eps * epsilon;
  const double h = half / mid;

  TanhProfile out;
  out.epsilon = epsilon;
  out.beta = beta;

  // The line problem is translation invariant; solving for the odd profile on
  // x >= 0 with phi(0) = 0 pins the centre. Unknowns are phi(k h), k = 1..mid.
  const int m = mid;
  std::vector<double> f(m + 1);
  for (int k = 0; k <= m; ++k) f[k] = std::min(k * h / (3.0 * epsilon), 1.0);
  f[0] = 0.0;
  auto at = [&](const std::vector<double>& g, int k) {
    if (k < 0) return -g[-k];
    if (k > m) return 1.0;
    return g[k];
  };
  const double c = b / (12.0 * h * h);
  const double offs[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
  std::vector<double> r(m + 1, 0.0), trial(m + 1);
  auto residual = [&](const std::vector<double>& g) {
    double mx = 0.0;
    for (int k = 1; k <= m; ++k) {
      double d2 = 0.0;
      for (int d = -2; d <= 2; ++d) d2 += offs[d + 2] * at(g, k + d);
      r[k] = c * d2 - a * psi_prime(g[k], pot);
      mx = std::max(mx, std::abs(r[k]));
    }
    return mx;
  };

  double rnorm = residual(f);
  Eigen::SparseMatrix<double> jac(m, m);
  Eigen::VectorXd rhs(m);
  int it = 0;
  for (; it < 100; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) {
      for (int d = -2; d <= 2; ++d) {
        int col = k + d;
        double sign = 1.0;
        if (col < 0) col = -col, sign = -1.0;
        if (col == 0 || col > m) continue;
        trip.emplace_back(k - 1, col - 1, sign * c * offs[d + 2]);
      }
      trip.emplace_back(k - 1, k - 1, -a * psi_second(f[k], pot));
      rhs[k - 1] = -r[k];
    }
    jac.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(jac);
    if (lu.info() != Eigen::Success) throw StepFailure("profile oracle: singular Jacobian", rnorm);
    const Eigen::VectorXd delta = lu.solve(rhs);
    const double step_norm = delta.cwiseAbs().maxCoeff();
    double lambda = 1.0, new_norm = rnorm;
    for (;;) {
      trial[0] = 0.0;
      for (int k = 1; k <= m; ++k) trial[k] = f[k] + lambda * delta[k - 1];
      new_norm = residual(trial);
      if (new_norm < (1.0 - 1e-4 * lambda) * rnorm || lambda < 1e-6 || step_norm * lambda < 1e-15)
        break;
      lambda *= 0.5;
    }
    f.swap(trial);
    rnorm = new_norm;
    if (step_norm * lambda < 1e-14) {
      ++it;
      break;
    }
  }
  out.newton_iterations = it;
  out.residual = rnorm;

  out.x.resize(n);
  out.phi.resize(n);
  for (int i = 0; i < n; ++i) {
    out.x[i] = (i - mid) * h;
    out.phi[i] = i >= mid ? f[i - mid] : -f[mid - i];
  }
  auto full = [&](int i) {
    if (i < 0) return -1.0;
    if (i >= n) return 1.0;
    return out.phi[i];
  };

  // Interfacial energy: trapezoid rule with fourth-order derivatives.
  double e = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d1 = (-full(i + 2) + 8.0 * full(i + 1) - 8.0 * full(i - 1) + full(i - 2)) /
                      (12.0 * h);
    const double dens = a * psi(out.phi[i], pot) + 0.5 * b * d1 * d1;
    e += (i == 0 || i == n - 1 ? 0.5 : 1.0) * dens * h;
  }
  out.energy = e;
  // Simpson rule for the integral of sqrt(2 Psi) over [-1, 1].
  const int ns = 20000;
  double acc = 0.0;
  for (int k = 0; k <= ns; ++k) {
    const double s = -1.0 + 2.0 * k / ns;
    const double w = (k == 0 || k == ns) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * std::sqrt(2.0 * std::max(psi(s, pot), 0.0));
  }
  out.potential_constant = acc * (2.0 / ns) / 3.0;
  out.energy_normalized = out.energy / out.potential_constant;

  const double inv = 1.0 / (std::numbers::sqrt2 * epsilon);
  for (int i = 0; i < n; ++i)
    out.max_error_vs_tanh =
        std::max(out.max_error_vs_tanh, std::abs(out.phi[i] - std::tanh(out.x[i] * inv)));
  return out;
}

StripRelaxation strip_relaxation_test(double epsilon, int nx, int ny, double t_end, double dt,
                                      double width_factor, double mobility) {
  SimConfig cfg;
  cfg.grid = Grid2D(nx, ny, 1.0, static_cast<double>(ny) / nx, Boundary::NeumannNoSlip);
  cfg.beta = 1.0;
  cfg.epsilon = epsilon;
  cfg.mobility = CoeffConfig{false, mobility, {mobility}, mobility, mobility};
  cfg.initial.kind = InitialKind::TanhStrip;
  cfg.initial.center_x = 0.5;
  cfg.initial.width = width_factor * epsilon;
  cfg.solver.krylov_tol = 1e-11;
  cfg.finalize();

  SimState s = initial_state(cfg);
  const Stepper stepper(cfg);
  const long steps = std::lround(t_end / dt);
  for (long k = 0; k < steps; ++k) stepper.advance(s, dt);

  const TanhProfile oracle = tanh_profile_oracle(epsilon, 1.0);
  StripRelaxation out;
  out.steps = steps;
  out.final_time = s.t;
  const int j = ny / 2;
  for (int i = 0; i < nx; ++i)
    out.max_error = std::max(out.max_error,
                             std::abs(s.phi(i, j) - oracle.sample(cfg.grid.xc(i) - 0.5)));
  return out;
}

// ---------------------------------------------------------------------------
// Manufactured solutions

MmsSetup::MmsSetup() {
  params.A = 1.0;
  params.B = 0.01;
  params.chi = 0.1;
  params.mobility_m = CoeffSpec::clamped_polynomial({0.01, 0.0, 0.005}, 0.005, 0.05);
  params.mobility_n = CoeffSpec::clamped_polynomial({0.1, 0.02}, 0.05, 0.2);
  params.viscosity_eta = CoeffSpec::clamped_polynomial({0.05, 0.01}, 0.02, 0.1);
}

namespace {

constexpr double kWave = 2.0 * std::numbers::pi;

struct MmsPoint {
  double phi, phx, phy, lap_phi, bih_phi, phi_t;
  double sig, sgx, sgy, lap_sig, sig_t;
  double u, v, ux, uy, vx, vy, u_t, v_t;
};

MmsPoint mms_point(double x, double y, double t) {
  const double k = kWave;
  const double sx = std::sin(k * x), cx = std::cos(k * x);
  const double sy = std::sin(k * y), cy = std::cos(k * y);
  const double a = 0.5 * std::exp(-t), b = 0.3 * std::cos(t), c = 0.1 * std::cos(t);
  const double bt = -0.3 * std::sin(t), ct = -0.1 * std::sin(t);
  MmsPoint p{};
  p.phi = a * sx * cy;
  p.phx = a * k * cx * cy;
  p.phy = -a * k * sx * sy;
  p.lap_phi = -2.0 * k * k * p.phi;
  p.bih_phi = 4.0 * k * k * k * k * p.phi;
  p.phi_t = -p.phi;
  p.sig = 1.0 + b * cx * sy;
  p.sgx = -b * k * sx * sy;
  p.sgy = b * k * cx * cy;
  p.lap_sig = -2.0 * k * k * b * cx * sy;
  p.sig_t = bt * cx * sy;
  p.u = c * sx * cy;
  p.v = -c * cx * sy;
  p.ux = c * k * cx * cy;
  p.uy = -c * k * sx * sy;
  p.vx = c * k * sx * sy;
  p.vy = -c * k * cx * cy;
  p.u_t = ct * sx * cy;
  p.v_t = -ct * cx * sy;
  return p;
}

struct MmsResidual {
  double phi, sigma, u, v;
};

MmsResidual mms_residual(double x, double y, double t, const ModelParams& prm) {
  const MmsPoint q = mms_point(x, y, t);
  const PotentialSpec& pot = prm.potential;
  const double A = prm.A, B = prm.B, chi = prm.chi;
  const double p1 = psi_prime(q.phi, pot), p2 = psi_second(q.phi, pot), p3 = psi_third(q.phi, pot);
  const double mu = A * p1 - B * q.lap_phi - chi * q.sig;
  const double g = A * p2 - B * (-2.0 * kWave * kWave);
  const double mux = g * q.phx - chi * q.sgx;
  const double muy = g * q.phy - chi * q.sgy;
  const double lap_mu = A * (p3 * (q.phx * q.phx + q.phy * q.phy) + p2 * q.lap_phi) -
                        B * q.bih_phi - chi * q.lap_sig;

  const double m = prm.mobility_m(q.phi), dm = prm.mobility_m.derivative(q.phi);
  const double n = prm.mobility_n(q.phi), dn = prm.mobility_n.derivative(q.phi);
  const double eta = prm.viscosity_eta(q.phi), deta = prm.viscosity_eta.derivative(q.phi);

  MmsResidual r{};
  r.phi = q.phi_t + q.u * q.phx + q.v * q.phy - (dm * (q.phx * mux + q.phy * muy) + m * lap_mu);
  const double wx = q.sgx - chi * q.phx, wy = q.sgy - chi * q.phy;
  const double lap_w = q.lap_sig - chi * q.lap_phi;
  r.sigma = q.sig_t + q.u * q.sgx + q.v * q.sgy - (dn * (q.phx * wx + q.phy * wy) + n * lap_w);
  const double ex = deta * q.phx, ey = deta * q.phy;
  const double shear = 0.5 * (q.uy + q.vx);
  const double k2 = 2.0 * kWave * kWave;
  const double visc_u = -eta * k2 * q.u + 2.0 * (q.ux * ex + shear * ey);
  const double visc_v = -eta * k2 * q.v + 2.0 * (shear * ex + q.vy * ey);
  const double pot_force = mu + chi * q.sig;
  r.u = q.u_t + q.u * q.ux + q.v * q.uy - visc_u - pot_force * q.phx;
  r.v = q.v_t + q.u * q.vx + q.v * q.vy - visc_v - pot_force * q.phy;
  return r;
}

double l2_cells(const ScalarField& a, const ScalarField& b) {
  const ScalarField d = a - b;
  return std::sqrt(cell_inner(d, d));
}

double l2_faces(const MacVelocity& a, const MacVelocity& b) {
  const MacVelocity d = a - b;
  return std::sqrt(face_inner(d, d));
}

double order(double coarse, double fine, double ratio) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return 0.0;
  return std::log(coarse / fine) / std::log(ratio);
}

}  // namespace

MmsExact mms_exact(const Grid2D& g, double t) {
  MmsExact e{ScalarField(g), ScalarField(g), MacVelocity(g)};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const MmsPoint q = mms_point(g.xc(i), g.yc(j), t);
      e.phi(i, j) = q.phi;
      e.sigma(i, j) = q.sig;
    }
  const double c = 0.1 * std::cos(t);
  e.v = curl_of_stream_function(g, [&](double x, double y) {
    return c / kWave * std::sin(kWave * x) * std::sin(kWave * y);
  });
  return e;
}

ExtraForcing mms_forcing(const Grid2D& g, double t, const ModelParams& p) {
  ExtraForcing f{ScalarField(g), ScalarField(g), MacVelocity(g)};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const MmsResidual r = mms_residual(g.xc(i), g.yc(j), t, p);
      f.phi(i, j) = r.phi;
      f.sigma(i, j) = r.sigma;
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) f.v.u(i, j) = mms_residual(i * g.hx(), g.yc(j), t, p).u;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.v.v(i, j) = mms_residual(g.xc(i), j * g.hy(), t, p).v;
  f.v.enforce_bc();
  return f;
}

MmsRun run_mms(int n, double dt, const MmsSetup& setup) {
  const Grid2D g(n, n, 1.0, 1.0, Boundary::Periodic);
  SolverSpec solver;
  solver.krylov_tol = setup.krylov_tol;
  solver.krylov_maxit = 2000;
  const Stepper stepper(g, setup.params, SourceSpec{}, solver);

  MmsRun run;
  run.n = n;
  run.steps = std::max(1L, std::lround(setup.t_end / dt));
  run.dt = setup.t_end / static_cast<double>(run.steps);

  const MmsExact e0 = mms_exact(g, 0.0);
  SimState s(g);
  s.phi = e0.phi;
  s.sigma = e0.sigma;
  s.v = e0.v;
  s.mu = chemical_potential(s.phi, s.sigma, setup.params);
  s.last = initial_report(s, setup.params);
  for (long k = 0; k < run.steps; ++k) {
    const double t_next = static_cast<double>(k + 1) * run.dt;
    const ExtraForcing f = mms_forcing(g, t_next, setup.params);
    stepper.advance(s, run.dt, &f);
    s.t = t_next;
  }
  const MmsExact e = mms_exact(g, s.t);
  run.err_phi = l2_cells(s.phi, e.phi);
  run.err_sigma = l2_cells(s.sigma, e.sigma);
  run.err_v = l2_faces(s.v, e.v);
  run.final_state = std::move(s);
  return run;
}

ConvergenceTable manufactured_solution_study(const std::vector<int>& resolutions,
                                             double dt_factor, const MmsSetup& setup) {
  ConvergenceTable table;
  table.kind = "spatial";
  for (std::size_t k = 0; k < resolutions.size(); ++k) {
    const int n = resolutions[k];
    const double h = 1.0 / n;
    const MmsRun run = run_mms(n, dt_factor * h * h, setup);
    ConvergenceRow row{n, run.dt, run.err_phi, run.err_sigma, run.err_v, 0.0, 0.0, 0.0};
    if (k > 0) {
      const ConvergenceRow& prev = table.rows.back();
      const double ratio = static_cast<double>(n) / prev.n;
      row.order_phi = order(prev.err_phi, row.err_phi, ratio);
      row.order_sigma = order(prev.err_sigma, row.err_sigma, ratio);
      row.order_v = order(prev.err_v, row.err_v, ratio);
    }
    table.rows.push_back(row);
  }
  return table;
}

ConvergenceTable manufactured_temporal_study(int n, const std::vector<double>& dts,
                                             const MmsSetup& setup) {
  std::vector<MmsRun> runs;
  for (double dt : dts) runs.push_back(run_mms(n, dt, setup));
  ConvergenceTable table;
  table.kind = "temporal";
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    const SimState& a = runs[k].final_state;
    const SimState& b = runs[k + 1].final_state;
    ConvergenceRow row{n, runs[k].dt, l2_cells(a.phi, b.phi), l2_cells(a.sigma, b.sigma),
                       l2_faces(a.v, b.v), 0.0, 0.0, 0.0};
    if (k > 0) {
      const ConvergenceRow& prev = table.rows.back();
      const double ratio = prev.dt / row.dt;
      row.order_phi = order(prev.err_phi, row.err_phi, ratio);
      row.order_sigma = order(prev.err_sigma, row.err_sigma, ratio);
      row.order_v = order(prev.err_v, row.err_v, ratio);
    }
    table.rows.push_back(row);
  }
  return table;
}

void ConvergenceTable::write_csv(std::ostream& out) const {
  out << "kind,n,dt,err_phi,err_sigma,err_v,order_phi,order_sigma,order_v\n";
  for (const auto& r : rows)
    out << kind << ',' << r.n << ',' << format_double(r.dt) << ',' << format_double(r.err_phi)
        << ',' << format_double(r.err_sigma) << ',' << format_double(r.err_v) << ','
        << format_double(r.order_phi) << ',' << format_double(r.order_sigma) << ','
        << format_double(r.order_v) << '\n';
}

void ConvergenceTable::print(std::ostream& out) const {
  out << kind << " convergence\n"
      << std::setw(6) << "n" << std::setw(12) << "dt" << std::setw(13) << "err_phi"
      << std::setw(13) << "err_sigma" << std::setw(13) << "err_v" << std::setw(8) << "p_phi"
      << std::setw(8) << "p_sig" << std::setw(8) << "p_v" << '\n';
  for (const auto& r : rows) {
    out << std::setw(6) << r.n << std::setw(12) << std::setprecision(4) << r.dt
        << std::scientific << std::setprecision(3) << std::setw(13) << r.err_phi << std::setw(13)
        << r.err_sigma << std::setw(13) << r.err_v << std::defaultfloat << std::fixed
        << std::setprecision(2) << std::setw(8) << r.order_phi << std::setw(8) << r.order_sigma
        << std::setw(8) << r.order_v << std::defaultfloat << '\n';
  }
}

// ---------------------------------------------------------------------------
// Variational check

VariationalCheck variational_gradient_check(const ScalarField& phi, const ScalarField& sigma,
                                            const ModelParams& p, int n_cells,
                                            std::uint64_t seed, double step) {
  const Grid2D& g = phi.grid();
  const ScalarField mu = chemical_potential(phi, sigma, p);
  const double mu_scale = mu.max_abs();
  const double ax = 1.0 / (g.hx() * g.hx()), ay = 1.0 / (g.hy() * g.hy());

  // Energy density terms that involve cell (i, j), per unit cell area.
  auto local = [&](int i, int j, double value) {
    double e = p.A * psi(value, p.potential) + p.chi * sigma(i, j) * (1.0 - value);
    auto face = [&](int ii, int jj, double a) {
      if (g.periodic()) {
        ii = (ii + g.nx) % g.nx;
        jj = (jj + g.ny) % g.ny;
      } else if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) {
        return;  // wall face: zero gradient
      }
      const double d = phi(ii, jj) - value;
      e += 0.5 * p.B * a * d * d;
    };
    face(i - 1, j, ax);
    face(i + 1, j, ax);
    face(i, j - 1, ay);
    face(i, j + 1, ay);
    return e;
  };

  std::mt19937_64 rng(seed);
  VariationalCheck out;
  for (int c = 0; c < n_cells; ++c) {
    const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(g.nx));
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(g.ny));
    const double f0 = phi(i, j);
    const double fd = (local(i, j, f0 + step) - local(i, j, f0 - step)) / (2.0 * step);
    const double denom = std::max(std::abs(mu(i, j)), 1e-3 * mu_scale);
    const double err = denom > 0.0 ? std::abs(fd - mu(i, j)) / denom : std::abs(fd - mu(i, j));
    out.max_relative_error = std::max(out.max_relative_error, err);
    ++out.cells_checked;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Continuous dependence

namespace {

ScalarField unit_field(const Grid2D& g, double kx, double ky, double phase) {
  ScalarField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f(i, j) = std::cos(kx * std::numbers::pi * g.xc(i) / g.lx + phase) *
                std::cos(ky * std::numbers::pi * g.yc(j) / g.ly);
  const double nrm = std::sqrt(cell_inner(f, f));
  f *= 1.0 / nrm;
  return f;
}

MacVelocity unit_velocity(const Grid2D& g) {
  const double pi = std::numbers::pi;
  MacVelocity w = curl_of_stream_function(g, [&](double x, double y) {
    const double sx = std::sin(pi * x / g.lx), sy = std::sin(pi * y / g.ly);
    return sx * sx * sy * sy;
  });
  w.enforce_bc();
  const double nrm = std::sqrt(face_inner(w, w));
  w *= 1.0 / nrm;
  return w;
}

double h1_semi(const ScalarField& f) {
  const FaceField gf = gradient_cc_to_face(f);
  return face_inner(gf, gf);
}

double velocity_gradient(const MacVelocity& w) {
  const CellVector c = face_to_cc(w);
  return h1_semi(c.x) + h1_semi(c.y);
}

struct Distance {
  double sup_part = 0.0;
  double integral = 0.0;
  double total() const { return sup_part + integral; }
};

double pointwise_part(const SimState& a, const SimState& b) {
  const ScalarField dp = a.phi - b.phi, ds = a.sigma - b.sigma;
  const MacVelocity dv = a.v - b.v;
  return cell_inner(dp, dp) + cell_inner(ds, ds) + face_inner(dv, dv);
}

double integrand(const SimState& a, const SimState& b) {
  const ScalarField dp = a.phi - b.phi, ds = a.sigma - b.sigma, dm = a.mu - b.mu;
  const MacVelocity dv = a.v - b.v;
  const ScalarField lap = laplacian(dp);
  return cell_inner(dm, dm) + h1_semi(ds) + velocity_gradient(dv) + cell_inner(dp, dp) +
         h1_semi(dp) + cell_inner(lap, lap);
}

bool finite_state(const SimState& s) {
  return s.phi.all_finite() && s.sigma.all_finite() && s.v.all_finite();
}

}  // namespace

SimConfig perturbation_base_config() {
  SimConfig cfg;
  cfg.grid = Grid2D(64, 64, 1.0, 1.0, Boundary::NeumannNoSlip);
  cfg.beta = 1.0;
  cfg.epsilon = 0.04;
  cfg.params.chi = 0.25;
  cfg.mobility = CoeffConfig{false, 1e-3, {1e-3}, 1e-3, 1e-3};
  cfg.sources.kind = SourceKind::Proliferation;
  cfg.sources.proliferation = 0.5;
  cfg.sources.apoptosis = 0.1;
  cfg.sources.consumption = 1.0;
  cfg.initial.kind = InitialKind::Disk;
  cfg.initial.radius = 0.25;
  cfg.initial.sigma_value = 1.0;
  cfg.solver.krylov_tol = 1e-12;
  cfg.solver.krylov_maxit = 2000;
  cfg.finalize();
  return cfg;
}

PerturbationReport perturbation_growth_test(const SimConfig& base,
                                            const std::vector<double>& delta0, double t_end,
                                            double dt) {
  const Grid2D& g = base.grid;
  const Stepper stepper(base);
  SimState ref = initial_state(base);
  const ScalarField dphi = unit_field(g, 1.0, 2.0, 0.3);
  const ScalarField dsig = unit_field(g, 2.0, 1.0, 0.0);
  const MacVelocity dv = unit_velocity(g);

  std::vector<SimState> runs;
  std::vector<Distance> dist(delta0.size());
  PerturbationReport rep;
  rep.delta0 = delta0;
  for (double d : delta0) {
    SimState s = ref;
    s.phi += d * dphi;
    s.sigma += d * dsig;
    s.v += d * dv;
    s.mu = chemical_potential(s.phi, s.sigma, base.params);
    s.last = initial_report(s, base.params);
    rep.d_initial.push_back(pointwise_part(s, ref));
    runs.push_back(std::move(s));
  }
  for (std::size_t k = 0; k < runs.size(); ++k) dist[k].sup_part = rep.d_initial[k];

  const long steps = std::lround(t_end / dt);
  for (long n = 0; n < steps; ++n) {
    stepper.advance(ref, dt);
    for (std::size_t k = 0; k < runs.size(); ++k) {
      stepper.advance(runs[k], dt);
      rep.finite = rep.finite && finite_state(runs[k]);
      dist[k].sup_part = std::max(dist[k].sup_part, pointwise_part(runs[k], ref));
      dist[k].integral += dt * integrand(runs[k], ref);
    }
  }
  std::vector<double> di, df;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    rep.d_final.push_back(dist[k].total());
    rep.growth.push_back(rep.d_initial[k] > 0.0 ? rep.d_final[k] / rep.d_initial[k] : 0.0);
    if (rep.d_initial[k] > 0.0 && rep.d_final[k] > 0.0) {
      di.push_back(rep.d_initial[k]);
      df.push_back(rep.d_final[k]);
    }
  }
  if (di.size() >= 2) rep.slope = loglog_slope(di, df);
  return rep;
}

std::vector<double> source_perturbation_sweep(const SimConfig& base,
                                              const std::vector<double>& amplitudes,
                                              double t_end, double dt) {
  const Grid2D& g = base.grid;
  const Stepper stepper(base);
  SimState ref = initial_state(base);
  const ScalarField shape = unit_field(g, 1.0, 1.0, 0.0);
  std::vector<SimState> runs(amplitudes.size(), ref);
  std::vector<ExtraForcing> extra;
  for (double a : amplitudes) extra.push_back({a * shape, ScalarField(g), MacVelocity(g)});
  std::vector<Distance> dist(amplitudes.size());
  const long steps = std::lround(t_end / dt);
  for (long n = 0; n < steps; ++n) {
    stepper.advance(ref, dt);
    for (std::size_t k = 0; k < runs.size(); ++k) {
      stepper.advance(runs[k], dt, &extra[k]);
      dist[k].sup_part = std::max(dist[k].sup_part, pointwise_part(runs[k], ref));
      dist[k].integral += dt * integrand(runs[k], ref);
    }
  }
  std::vector<double> out;
  for (const auto& d : dist) out.push_back(d.total());
  return out;
}

// ---------------------------------------------------------------------------
// Energy audit

SimConfig energy_dissipation_config() {
  SimConfig cfg;
  cfg.grid = Grid2D(128, 128, 1.0, 1.0, Boundary::NeumannNoSlip);
  cfg.beta = 1.0;
  cfg.epsilon = 0.02;
  cfg.params.chi = 0.0;
  cfg.mobility = CoeffConfig{false, 1e-3, {1e-3}, 1e-3, 1e-3};
  cfg.viscosity = CoeffConfig{false, 0.1, {0.1}, 0.1, 0.1};
  cfg.initial.kind = InitialKind::Random;
  cfg.initial.phi_value = 0.0;
  cfg.initial.amplitude = 0.05;
  cfg.initial.seed = 1;
  cfg.time.t_end = 2.0;
  cfg.time.dt_init = cfg.time.dt_min = cfg.time.dt_max = 1e-3;
  cfg.solver.krylov_tol = 1e-8;
  cfg.finalize();
  return cfg;
}

SimConfig energy_identity_config() {
  SimConfig cfg = energy_dissipation_config();
  cfg.params.chi = 0.25;
  cfg.sources.kind = SourceKind::Proliferation;
  cfg.sources.proliferation = 0.5;
  cfg.sources.apoptosis = 0.1;
  cfg.sources.consumption = 1.0;
  cfg.initial.kind = InitialKind::Disk;
  cfg.initial.radius = 0.25;
  cfg.initial.sigma_value = 1.0;
  cfg.time.t_end = 0.5;
  // The stabilized coupling adds dt phi^2 to the effective mobility, which
  // swamps m = 1e-3 at these step sizes and hides the first-order residual.
  cfg.solver.stabilized_coupling = false;
  cfg.solver.krylov_tol = 1e-10;
  cfg.finalize();
  return cfg;
}

EnergyStudyRow audit_trajectory(const SimConfig& cfg_in, double dt, double t_end) {
  SimConfig cfg = cfg_in;
  cfg.time.t_end = t_end;
  cfg.time.dt_init = cfg.time.dt_min = cfg.time.dt_max = dt;
  cfg.validate();
  require_valid(cfg.params, cfg.solver.override_validation);
  const Stepper stepper(cfg);
  SimState s = initial_state(cfg);
  const double e0 = s.last.E_total;
  EnergyStudyRow row;
  row.dt = dt;
  const long steps = std::lround(t_end / dt);
  for (long n = 0; n < steps; ++n) {
    const double e_prev = s.last.E_total;
    const EnergyReport r = stepper.advance(s, dt);
    row.max_abs_imbalance = std::max(row.max_abs_imbalance, std::abs(r.imbalance));
    row.max_mass_phi = std::max(row.max_mass_phi, std::abs(r.mass_phi));
    row.max_mass_sigma = std::max(row.max_mass_sigma, std::abs(r.mass_sigma));
    row.max_div_ratio =
        std::max(row.max_div_ratio, r.div_max / (1e-8 * s.v.max_abs() + 1e-12));
    row.max_energy_increase = std::max(row.max_energy_increase, (r.E_total - e_prev) / e0);
    row.final_imbalance = r.imbalance;
  }
  row.steps = steps;
  return row;
}

EnergyStudy energy_residual_study(const SimConfig& base, const std::vector<double>& dts,
                                  double t_end) {
  EnergyStudy study;
  std::vector<double> x, y;
  for (double dt : dts) {
    study.rows.push_back(audit_trajectory(base, dt, t_end));
    x.push_back(dt);
    y.push_back(std::abs(study.rows.back().final_imbalance));
  }
  if (x.size() >= 2) study.slope = loglog_slope(x, y);
  return study;
}

void EnergyStudy::print(std::ostream& out) const {
  out << std::setw(10) << "dt" << std::setw(8) << "steps" << std::setw(15) << "imbalance(T)"
      << std::setw(15) << "max|imb|" << std::setw(13) << "max|m_phi|" << std::setw(13)
      << "max|m_sig|" << std::setw(13) << "max dE/E0" << '\n';
  for (const auto& r : rows)
    out << std::setw(10) << r.dt << std::setw(8) << r.steps << std::scientific
        << std::setprecision(4) << std::setw(15) << r.final_imbalance << std::setw(15)
        << r.max_abs_imbalance << std::setprecision(2) << std::setw(13) << r.max_mass_phi
        << std::setw(13) << r.max_mass_sigma << std::setw(13) << r.max_energy_increase
        << std::defaultfloat << std::setprecision(6) << '\n';
  out << "slope of |imbalance(T)| vs dt: " << slope << '\n';
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nsch
