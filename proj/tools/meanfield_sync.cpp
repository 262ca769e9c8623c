// meanfield_sync: hypotheses, dispersion tubes, synchronization and locking
// for mean-field phase oscillator models.

#include <CLI11.hpp>

#include <iostream>
#include <stdexcept>

#include "mfsync/commands.hpp"
#include "mfsync/config.hpp"

namespace {

using mfsync::RunConfig;

struct Flags {
  std::string model;
  double omega = 0.0;
  double kappa = 0.0;
  int n = 0;
  std::string config_file;
  std::string perturbation;
  double amplitude = 0.0;
  bool relative = false;
  double mode = 1.0;
  std::vector<double> detune;
  std::vector<double> phases;
  std::vector<double> kappa_range;
  std::vector<double> omega_range;
};

void add_common(CLI::App* app, RunConfig& cfg, Flags& f) {
  app->add_option("--model", f.model, "kuramoto, winfree or custom (custom needs --config)")
      ->check(CLI::IsMember({"kuramoto", "winfree", "custom"}));
  app->add_option("--omega", f.omega, "natural frequency");
  app->add_option("--kappa", f.kappa, "coupling strength");
  app->add_option("--n", f.n, "number of oscillators");
  app->add_option("--config", f.config_file, "JSON model config")->check(CLI::ExistingFile);
  app->add_option("--out", cfg.out_dir, "output directory");
  app->add_option("--seed", cfg.seed, "seed for random initial conditions and perturbations");
  app->add_option("--grid", cfg.grid, "panels of the diagonal grid (even)");
  app->add_option("--h", cfg.h, "integration step");
  app->add_option("--tmax", cfg.t_max, "integration horizon");
  app->add_option("--D", cfg.d, "dispersion bound, 0 < D <= D*");
  app->add_flag("--optimize-radius", cfg.optimize_radius, "choose D maximizing r");
  app->add_flag("--strict", cfg.strict, "stop at the first tube violation");
  app->add_flag("--empirical", cfg.empirical, "sweep: short synchronization probe per cell");
  app->add_flag("--svg", cfg.svg, "also write SVG plots");
  app->add_option("--perturbation", f.perturbation, "zero, detune or trig")
      ->check(CLI::IsMember({"zero", "detune", "trig"}));
  app->add_option("--amplitude", f.amplitude, "perturbation amplitude");
  app->add_flag("--relative", f.relative, "amplitude is a fraction of r");
  app->add_option("--mode", f.mode, "trig perturbation mode (integer for periodic H)");
  app->add_option("--detune", f.detune, "explicit detunes, one per oscillator")->delimiter(',');
  app->add_option("--phases", f.phases, "explicit trig phases, one per oscillator")->delimiter(',');
}

void apply(const CLI::App* app, const Flags& f, RunConfig& cfg) {
  if (!f.config_file.empty()) cfg.model = mfsync::load_model_config(f.config_file);
  auto& m = cfg.model;
  auto& p = m.perturbation;
  if (app->count("--model")) m.type = f.model;
  if (app->count("--omega")) m.omega = f.omega;
  if (app->count("--kappa")) m.kappa = f.kappa;
  if (app->count("--n")) m.n = f.n;
  if (m.type == "custom" && m.terms.empty()) {
    throw std::invalid_argument("custom model needs --config with a terms array");
  }
  if (app->count("--perturbation")) p.kind = f.perturbation;
  if (app->count("--amplitude")) p.amplitude = f.amplitude;
  if (app->count("--relative")) p.relative = f.relative;
  if (app->count("--mode")) p.mode = f.mode;
  if (app->count("--detune")) {
    p.kind = "detune";
    p.values = f.detune;
  }
  if (app->count("--phases")) p.phases = f.phases;
  auto range = [](const std::vector<double>& v, mfsync::SweepRange& r) {
    if (v.empty()) return;
    if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] >= v[0])) {
      throw std::invalid_argument("ranges are MIN,MAX with 0 < MIN <= MAX");
    }
    r.min = v[0];
    r.max = v[1];
  };
  range(f.kappa_range, cfg.kappa_range);
  range(f.omega_range, cfg.omega_range);
  if (cfg.grid < 2 || cfg.grid % 2) throw std::invalid_argument("--grid must be even and >= 2");
  if (cfg.h && !(*cfg.h > 0.0)) throw std::invalid_argument("--h must be positive");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronization analysis for mean-field phase oscillator models"};
  app.require_subcommand(1);
  // -h would clash with the step option --h
  app.set_help_flag("--help", "print help and exit");

  RunConfig cfg;
  Flags flags;

  auto* check = app.add_subcommand("check", "evaluate the hypotheses (exit 2 if either fails)");
  auto* disp = app.add_subcommand("dispersion", "dispersion curve and perturbation budget");
  auto* sim = app.add_subcommand("simulate", "integrate and check tube invariance");
  auto* lock = app.add_subcommand("lock", "periodically locked state via the return map");
  auto* sweep = app.add_subcommand("sweep", "classify a (kappa, omega) grid");
  for (auto* sub : {check, disp, sim, lock, sweep}) {
    sub->set_help_flag("--help", "print help and exit");
    add_common(sub, cfg, flags);
  }

  sim->add_option("--stride", cfg.stride, "record every k-th step");
  sim->add_option("--x0", cfg.x0, "initial phases (normalized), comma separated")->delimiter(',');
  sim->add_option("--spread", cfg.spread_fraction, "random start fills this fraction of the tube")
      ->check(CLI::Range(0.0, 0.999999));
  lock->add_option("--tol", cfg.tol, "fixed-point tolerance");
  lock->add_option("--max-iter", cfg.max_iter, "Picard iterations before Newton");
  lock->add_option("--psi-samples", cfg.psi_samples, "Psi samples per period");
  sweep->add_option("--kappa-range", flags.kappa_range, "MIN,MAX")->delimiter(',');
  sweep->add_option("--omega-range", flags.omega_range, "MIN,MAX")->delimiter(',');
  sweep->add_option("--kappa-count", cfg.kappa_range.count, "grid points in kappa");
  sweep->add_option("--omega-count", cfg.omega_range.count, "grid points in omega");
  sweep->add_option("--probe-t", cfg.probe_t, "horizon of the --empirical probe");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? mfsync::kExitOk : mfsync::kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    apply(chosen, flags, cfg);
    if (chosen == check) return mfsync::cmd_check(cfg, std::cout);
    if (chosen == disp) return mfsync::cmd_dispersion(cfg, std::cout);
    if (chosen == sim) return mfsync::cmd_simulate(cfg, std::cout);
    if (chosen == lock) return mfsync::cmd_lock(cfg, std::cout);
    return mfsync::cmd_sweep(cfg, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mfsync::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mfsync::kExitSolver;
  }
}
