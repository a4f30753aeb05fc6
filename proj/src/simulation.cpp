#include "nsch/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>

#include "json.hpp"
#include "nsch/error.hpp"
#include "nsch/grid_ops.hpp"
#include "nsch/io.hpp"
#include "nsch/parallel.hpp"

#ifndef NSCH_VERSION
#define NSCH_VERSION "0.1.0"
#endif

namespace nsch {

std::string version_string() { return NSCH_VERSION; }

Stepper::Stepper(const Grid2D& grid, const ModelParams& params, const SourceSpec& sources,
                 const SolverSpec& solver, const PrescribedSources* prescribed)
    : grid_(grid),
      params_(params),
      sources_(sources),
      solver_(solver),
      prescribed_(prescribed),
      ch_(grid, params),
      nutrient_(grid, params),
      ns_(grid, params) {}

Stepper::Stepper(const SimConfig& cfg, const PrescribedSources* prescribed)
    : Stepper(cfg.grid, cfg.params, cfg.sources, cfg.solver, prescribed) {}

EnergyReport Stepper::advance(SimState& s, double dt, const ExtraForcing* extra) const {
  SourceFields src = eval_sources(s.phi, s.sigma, s.t, sources_, prescribed_);
  if (extra) {
    src.gamma += extra->phi;
    src.s += extra->sigma;
  }

  ChStepConfig cc;
  cc.dt = dt;
  cc.krylov_tol = solver_.krylov_tol;
  cc.krylov_maxit = solver_.krylov_maxit;
  cc.stabilized_convection = solver_.stabilized_coupling;
  ChStepResult ch = ch_.step(s.phi, s.sigma, s.v, src.gamma, cc);

  SigmaStepConfig sc;
  sc.dt = dt;
  sc.krylov_tol = solver_.krylov_tol;
  sc.krylov_maxit = solver_.krylov_maxit;
  SigmaStepResult sg = nutrient_.step(s.sigma, ch.phi, s.v, src.s, sc);

  NsStepConfig nc;
  nc.dt = dt;
  nc.krylov_tol = solver_.krylov_tol;
  nc.krylov_maxit = solver_.krylov_maxit;
  nc.poisson_tol = solver_.poisson_tol;
  nc.potential_form = solver_.stabilized_coupling;
  NsStepResult ns = ns_.step(s.v, s.phi, ch.phi, ch.mu, s.sigma, nc, extra ? &extra->v : nullptr);

  EnergyReport r = total_energy(ch.phi, sg.sigma, ns.v, params_, s.t + dt);
  r.dt = dt;
  const Dissipation d = dissipation_rates(ch.phi, ch.mu, sg.sigma, ns.v, src.gamma, src.s, params_);
  r.D_mu = d.D_mu;
  r.D_sigma = d.D_sigma;
  r.D_visc = d.D_visc;
  r.W_sources = d.W_sources;
  r.imbalance = energy_balance_residual(s.last, r, d, dt);
  const MassResidual m = mass_balance(s.phi, ch.phi, s.sigma, sg.sigma, src.gamma, src.s, dt);
  r.mass_phi = m.phi;
  r.mass_sigma = m.sigma;
  r.div_max = ns.div_max;
  r.krylov_iters = ch.krylov.iterations + sg.krylov.iterations + ns.krylov.iterations;
  if (!std::isfinite(r.E_total)) throw StepFailure("non-finite energy", 0.0);

  s.mu = chemical_potential(ch.phi, sg.sigma, params_);
  s.phi = std::move(ch.phi);
  s.sigma = std::move(sg.sigma);
  s.v = std::move(ns.v);
  s.q = std::move(ns.q);
  s.t += dt;
  s.step += 1;
  s.dt_prev = dt;
  s.last = r;
  return r;
}

namespace {

// Uniform on [-1, 1) from the top 53 bits; fixed mapping so initial data do
// not depend on the standard library's distribution implementation.
double symmetric_unit(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace

EnergyReport initial_report(const SimState& s, const ModelParams& p) {
  EnergyReport r = total_energy(s.phi, s.sigma, s.v, p, s.t);
  r.div_max = divergence_max(s.v);
  return r;
}

SimState initial_state(const SimConfig& cfg) {
  const Grid2D& g = cfg.grid;
  const InitialSpec& in = cfg.initial;
  SimState s(g);
  s.seed = in.seed;
  const double width = in.width > 0.0 ? in.width : std::sqrt(cfg.params.B / cfg.params.A);
  const double scale = 1.0 / (std::numbers::sqrt2 * width);
  switch (in.kind) {
    case InitialKind::Uniform:
      s.phi.fill(in.phi_value);
      break;
    case InitialKind::Random: {
      std::mt19937_64 rng(in.seed);
      for (std::size_t k = 0; k < s.phi.size(); ++k)
        s.phi[k] = in.phi_value + in.amplitude * symmetric_unit(rng);
      break;
    }
    case InitialKind::Disk:
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double r = std::hypot(g.xc(i) - in.center_x, g.yc(j) - in.center_y);
          s.phi(i, j) = std::tanh((in.radius - r) * scale);
        }
      break;
    case InitialKind::TanhStrip:
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s.phi(i, j) = std::tanh((g.xc(i) - in.center_x) * scale);
      break;
    case InitialKind::File:
      s.phi = read_scalar_field(in.phi_file, g);
      break;
  }
  if (in.kind == InitialKind::File && !in.sigma_file.empty())
    s.sigma = read_scalar_field(in.sigma_file, g);
  else
    s.sigma.fill(in.sigma_value);
  s.mu = chemical_potential(s.phi, s.sigma, cfg.params);
  s.last = initial_report(s, cfg.params);
  return s;
}

double next_dt(const SimConfig& cfg, const SimState& s, double dt_prev) {
  const Grid2D& g = cfg.grid;
  const double h = std::min(g.hx(), g.hy());
  double dt = std::min(dt_prev * 1.5, cfg.time.dt_max);
  const double vmax = s.v.max_abs();
  if (vmax > 0.0) dt = std::min(dt, cfg.time.cfl * h / vmax);
  const double n_max = cfg.params.mobility_n.upper;
  const double cross = 0.25 * h * h / (cfg.params.chi * n_max + 1e-300);
  dt = std::min(dt, cross);
  dt = std::max(dt, cfg.time.dt_min);
  const double remaining = cfg.time.t_end - s.t;
  if (remaining <= dt * (1.0 + 1e-6)) dt = remaining;
  return dt;
}

namespace {

std::filesystem::path under(const std::filesystem::path& dir, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : dir / path;
}

void write_manifest(const std::filesystem::path& path, const SimConfig& cfg, const RunReport& rep,
                    std::uint64_t seed, const ValidationReport& validation) {
  nlohmann::ordered_json j;
  j["version"] = version_string();
  j["config_hash"] = config_hash(cfg);
  j["seed"] = seed;
  j["threads"] = configured_threads();
  j["steps"] = rep.steps;
  j["t_final"] = rep.t_final;
  j["retries"] = rep.retries;
  j["status"] = rep.aborted ? "aborted" : "completed";
  if (!rep.message.empty()) j["message"] = rep.message;
  j["wall_seconds"] = rep.wall_seconds;
  j["validation_passed"] = validation.ok();
  if (!validation.ok()) j["validation"] = validation.summary();
  j["state_dependent_sources"] = cfg.sources.state_dependent();
  if (cfg.sources.state_dependent())
    j["note"] =
        "state-dependent sources are beyond the hypotheses of the existence theorem "
        "(prescribed Gamma, S)";
  j["config"] = save_config(cfg);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

RunReport run_simulation(const SimConfig& cfg_in, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  apply_thread_limit();
  SimConfig cfg = cfg_in;
  if (opt.seed) cfg.initial.seed = *opt.seed;
  if (opt.until) cfg.time.t_end = *opt.until;
  cfg.validate();
  const ValidationReport validation = validate_params(cfg.params);
  require_valid(cfg.params, cfg.solver.override_validation);

  std::filesystem::create_directories(opt.out_dir);
  PrescribedSources prescribed;
  if (cfg.sources.kind == SourceKind::Prescribed)
    prescribed = PrescribedSources::load(under(opt.out_dir, cfg.sources.path).string(), cfg.grid);

  const bool restart = !opt.restart.empty();
  SimState s;
  if (restart) {
    s = read_checkpoint(opt.restart);
    if (!(s.grid() == cfg.grid)) throw ConfigError("checkpoint grid does not match the config");
  } else {
    s = initial_state(cfg);
  }
  const std::uint64_t seed = s.seed;

  RunReport rep;
  rep.series_path = under(opt.out_dir, cfg.output.series_path);
  SeriesWriter series(rep.series_path, seed, config_hash(cfg), restart);
  const auto snap_dir = under(opt.out_dir, cfg.output.snapshot_dir);
  if (!restart) {
    series.write_row(s.last);
    write_snapshot(s, snap_dir, cfg.output.format, cfg.params);
  }

  const Stepper stepper(cfg, &prescribed);
  double dt_prev = s.dt_prev > 0.0 ? s.dt_prev : cfg.time.dt_init / 1.5;
  const double t_end = cfg.time.t_end;
  const double t_eps = 1e-12 * std::max(1.0, t_end);
  long last_snapshot = s.step;
  while (s.t < t_end - t_eps) {
    double dt = next_dt(cfg, s, dt_prev);
    int attempt = 0;
    for (;;) {
      try {
        stepper.advance(s, dt);
        break;
      } catch (const StepFailure& e) {
        if (attempt >= 5) {
          rep.aborted = true;
          rep.message = std::string(e.what()) + " (residual " + format_double(e.residual()) +
                        ", dt " + format_double(dt) + ")";
          break;
        }
        ++attempt;
        ++rep.retries;
        dt *= 0.5;
        if (opt.verbose)
          std::cerr << "step " << s.step + 1 << ": " << e.what() << "; retrying with dt = " << dt
                    << '\n';
      }
    }
    if (rep.aborted) {
      write_checkpoint(opt.out_dir / "abort_checkpoint.bin", s);
      break;
    }
    dt_prev = dt;
    series.write_row(s.last);
    if (cfg.output.snapshot_every > 0 && s.step % cfg.output.snapshot_every == 0) {
      write_snapshot(s, snap_dir, cfg.output.format, cfg.params);
      last_snapshot = s.step;
    }
    if (cfg.output.checkpoint_every > 0 && s.step % cfg.output.checkpoint_every == 0)
      write_checkpoint(opt.out_dir / "checkpoint.bin", s);
    if (opt.verbose && s.step % 100 == 0)
      std::cerr << "step " << s.step << " t = " << s.t << " E = " << s.last.E_total << '\n';
  }
  series.flush();
  if (!rep.aborted && last_snapshot != s.step) write_snapshot(s, snap_dir, cfg.output.format, cfg.params);

  rep.steps = s.step;
  rep.t_final = s.t;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(opt.out_dir / "manifest.json", cfg, rep, seed, validation);
  return rep;
}

}  // namespace nsch
