// nsch: command-line driver for simulations and verification studies.
#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nsch/config.hpp"
#include "nsch/core_model.hpp"
#include "nsch/error.hpp"
#include "nsch/parallel.hpp"
#include "nsch/simulation.hpp"
#include "nsch/verification.hpp"

namespace fs = std::filesystem;
using namespace nsch;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> until;
  bool override_validation = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Configuration file (section.key = value)");
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--seed", c.seed, "Override initial.seed");
  app->add_option("--until", c.until, "Override time.T_end");
  app->add_flag("--override-validation", c.override_validation,
                "Run even when model assumptions are violated");
}

SimConfig config_from(const Common& c, const SimConfig& fallback) {
  SimConfig cfg = c.config.empty() ? fallback : load_config(c.config);
  if (c.seed) cfg.initial.seed = *c.seed;
  if (c.until) cfg.time.t_end = *c.until;
  if (c.override_validation) cfg.solver.override_validation = true;
  return cfg;
}

bool check(bool ok, const std::string& what) {
  std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << '\n';
  return ok;
}

int cmd_run(const Common& c, const std::string& restart, bool verbose) {
  SimConfig cfg = config_from(c, SimConfig{});
  RunOptions opt;
  opt.out_dir = c.out;
  opt.until = c.until;
  opt.seed = c.seed;
  opt.restart = restart;
  opt.verbose = verbose;
  const RunReport rep = run_simulation(cfg, opt);
  std::cout << "steps " << rep.steps << "  t " << rep.t_final << "  retries " << rep.retries
            << "  wall " << rep.wall_seconds << " s\n";
  if (rep.aborted) {
    std::cerr << "aborted: " << rep.message << '\n';
    return 3;
  }
  return 0;
}

int cmd_validate(const Common& c) {
  const SimConfig cfg = config_from(c, SimConfig{});
  const ValidationReport rep = validate_params(cfg.params);
  std::cout << "config hash " << config_hash(cfg) << '\n';
  if (rep.ok()) {
    std::cout << "valid\n";
    return 0;
  }
  std::cout << rep.summary() << '\n';
  if (cfg.solver.override_validation) {
    std::cout << "violations overridden\n";
    return 0;
  }
  return 1;
}

int cmd_oracle(double eps, double beta, bool strip) {
  bool ok = true;
  const TanhProfile prof = tanh_profile_oracle(eps, beta);
  std::cout << "profile: eps " << eps << "  beta " << beta << "  newton " << prof.newton_iterations
            << "  residual " << prof.residual << '\n'
            << "  max |phi - tanh(x/(sqrt2 eps))| = " << prof.max_error_vs_tanh << '\n'
            << "  energy per length " << prof.energy << " (raw), " << prof.energy_normalized
            << " (normalized by " << prof.potential_constant << ")\n"
            << "  10-90 width " << prof.width_10_90() << '\n';
  ok &= check(prof.max_error_vs_tanh <= 1e-8, "profile matches tanh to 1e-8");
  double odd = 0.0;
  const std::size_t n = prof.phi.size();
  for (std::size_t k = 0; k < n; ++k) odd = std::max(odd, std::abs(prof.phi[k] + prof.phi[n - 1 - k]));
  ok &= check(odd <= 1e-12, "profile is odd (" + std::to_string(odd) + ")");
  const TanhProfile half = tanh_profile_oracle(0.5 * eps, beta);
  const double ratio = half.width_10_90() / prof.width_10_90();
  ok &= check(std::abs(ratio - 0.5) < 1e-6, "halving eps halves the width (ratio " +
                                                std::to_string(ratio) + ")");
  if (strip) {
    const StripRelaxation s = strip_relaxation_test(eps);
    std::cout << "strip relaxation: " << s.steps << " steps to t " << s.final_time
              << ", max cross-section error " << s.max_error << '\n';
    ok &= check(s.max_error <= 1e-3, "2D strip relaxes to the 1D profile within 1e-3");
  }
  return ok ? 0 : 1;
}

bool order_ok(double got, double want, double tol) { return std::abs(got - want) <= tol; }

int cmd_convergence(const std::string& kind, const std::string& out) {
  bool ok = true;
  const MmsSetup setup;
  auto emit = [&](const ConvergenceTable& t) {
    t.print(std::cout);
    if (!out.empty()) {
      fs::create_directories(out);
      std::ofstream f(fs::path(out) / ("convergence_" + t.kind + ".csv"));
      t.write_csv(f);
    }
  };
  if (kind == "spatial" || kind == "both") {
    const ConvergenceTable t = manufactured_solution_study({32, 64, 128}, 1.0, setup);
    emit(t);
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
      const auto& r = t.rows[k];
      ok &= check(order_ok(r.order_phi, 2.0, 0.2) && order_ok(r.order_sigma, 2.0, 0.2) &&
                      order_ok(r.order_v, 2.0, 0.2),
                  "spatial order 2 +- 0.2 at n = " + std::to_string(r.n));
    }
  }
  if (kind == "temporal" || kind == "both") {
    const ConvergenceTable t = manufactured_temporal_study(128, {2e-3, 1e-3, 5e-4}, setup);
    emit(t);
    const auto& r = t.rows.back();
    ok &= check(order_ok(r.order_phi, 1.0, 0.2) && order_ok(r.order_sigma, 1.0, 0.2) &&
                    order_ok(r.order_v, 1.0, 0.2),
                "temporal order 1 +- 0.2");
  }
  return ok ? 0 : 1;
}

int cmd_energy(const Common& c, std::vector<double> dts, double t_end) {
  const SimConfig base = config_from(c, energy_identity_config());
  if (c.until) t_end = *c.until;
  const EnergyStudy st = energy_residual_study(base, dts, t_end);
  st.print(std::cout);
  bool ok = check(std::abs(st.slope - 1.0) <= 0.2, "imbalance slope 1 +- 0.2");
  for (const auto& r : st.rows) {
    ok &= check(r.max_mass_phi <= 10.0 * base.solver.krylov_tol &&
                    r.max_mass_sigma <= 10.0 * base.solver.krylov_tol,
                "mass balance within 10 krylov_tol at dt " + std::to_string(r.dt));
    ok &= check(r.max_div_ratio <= 1.0, "divergence bound at dt " + std::to_string(r.dt));
  }
  return ok ? 0 : 1;
}

int cmd_perturbation(const Common& c, std::vector<double> deltas, double t_end, double dt) {
  const SimConfig base = config_from(c, perturbation_base_config());
  if (c.until) t_end = *c.until;
  const PerturbationReport rep = perturbation_growth_test(base, deltas, t_end, dt);
  std::cout << "delta0        d(0)          d(T)          d(T)/d(0)\n";
  for (std::size_t k = 0; k < deltas.size(); ++k)
    std::cout << rep.delta0[k] << "  " << rep.d_initial[k] << "  " << rep.d_final[k] << "  "
              << rep.growth[k] << '\n';
  std::cout << "log-log slope " << rep.slope << '\n';
  bool ok = check(rep.finite, "all trajectories finite");
  ok &= check(std::abs(rep.slope - 1.0) <= 0.3, "d(T) linear in d(0): slope 1 +- 0.3");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_limit();
  CLI::App app{"Navier-Stokes / Cahn-Hilliard / chemotaxis solver"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Common run_c, val_c, en_c, pert_c;
  std::string restart;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run a simulation");
  add_common(run, run_c);
  run->add_option("--restart", restart, "Resume from a checkpoint file");
  run->add_flag("-v,--verbose", verbose, "Print one line per step");

  auto* val = app.add_subcommand("validate-config", "Parse a config and check model assumptions");
  add_common(val, val_c);

  double eps = 0.05, beta = 1.0;
  bool no_strip = false;
  auto* oracle = app.add_subcommand("verify-oracle", "1D interface profile vs tanh, 2D strip relaxation");
  oracle->add_option("--epsilon", eps, "Interface width parameter");
  oracle->add_option("--beta", beta, "Surface tension scale");
  oracle->add_flag("--no-strip", no_strip, "Skip the 2D relaxation run");

  std::string conv_kind = "both", conv_out;
  auto* conv = app.add_subcommand("verify-convergence", "Manufactured-solution convergence study");
  conv->add_option("--kind", conv_kind, "spatial | temporal | both")
      ->check(CLI::IsMember({"spatial", "temporal", "both"}));
  conv->add_option("--out", conv_out, "Directory for convergence CSVs");

  std::vector<double> dts{4e-3, 2e-3, 1e-3};
  double en_t = 0.5;
  auto* energy = app.add_subcommand("verify-energy", "Energy-identity residual vs dt");
  add_common(energy, en_c);
  energy->add_option("--dt", dts, "Step sizes");
  energy->add_option("--T", en_t, "End time");

  std::vector<double> deltas{1e-4, 5e-5, 2.5e-5};
  double pert_t = 0.25, pert_dt = 1e-3;
  auto* pert = app.add_subcommand("verify-perturbation", "Continuous dependence on initial data");
  add_common(pert, pert_c);
  pert->add_option("--delta", deltas, "Initial perturbation sizes");
  pert->add_option("--T", pert_t, "End time");
  pert->add_option("--dt", pert_dt, "Step size");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_c, restart, verbose);
    if (*val) return cmd_validate(val_c);
    if (*oracle) return cmd_oracle(eps, beta, !no_strip);
    if (*conv) return cmd_convergence(conv_kind, conv_out);
    if (*energy) return cmd_energy(en_c, dts, en_t);
    if (*pert) return cmd_perturbation(pert_c, deltas, pert_t, pert_dt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
