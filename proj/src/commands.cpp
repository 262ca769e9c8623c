#include "mfsync/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

#include "mfsync/dispersion.hpp"
#include "mfsync/hypotheses.hpp"
#include "mfsync/integrator.hpp"
#include "mfsync/locking.hpp"
#include "mfsync/report.hpp"
#include "mfsync/sweep.hpp"
#include "mfsync/sync_analysis.hpp"

namespace mfsync {

namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& config, const std::string& name) {
  fs::create_directories(config.out_dir);
  return (fs::path(config.out_dir) / name).string();
}

HypothesisReport run_check(const RunConfig& config, const ModelSpec& model) {
  HypothesisOptions opt;
  opt.profile_panels = config.grid;
  return check_hypotheses(model, opt);
}

// Everything the tube-based commands share.
struct Setup {
  ModelSpec model;
  HypothesisReport report;
  LambdaProfile profile;
  DispersionParams params;
  DispersionCurve curve;
};

std::optional<double> chosen_d(const RunConfig& config, const HypothesisReport& report) {
  if (config.d) return config.d;
  if (!config.optimize_radius) return std::nullopt;
  const Eta eta = compute_eta(report);
  return optimal_radius_d(eta, report.lambda1, report.lambda2);
}

// Returns an exit code when the run cannot continue.
std::optional<int> prepare(const RunConfig& config, Setup& s, nlohmann::json& doc) {
  s.model = build_model(config.model);
  s.report = run_check(config, s.model);
  doc["hypotheses"] = to_json(s.report);
  if (!s.report.holds_h || !s.report.holds_hstar) {
    doc["error"] = "hypotheses fail: " + s.report.diagnostic;
    return kExitHypothesis;
  }
  s.params = make_dispersion_params(s.report, chosen_d(config, s.report));
  s.profile = build_lambda_profile(s.model, config.grid);
  s.curve = build_curve(s.profile, s.params);
  doc["dispersion"] = to_json(s.params);
  return std::nullopt;
}

double step_for(const RunConfig& config, const HypothesisReport& report) {
  return config.h ? *config.h : default_step(report.alpha, report.l_total);
}

void emit(std::ostream& out, const nlohmann::json& doc) { out << doc.dump(2) << '\n'; }

}  // namespace

int cmd_check(const RunConfig& config, std::ostream& out) {
  const ModelSpec model = build_model(config.model);
  const HypothesisReport report = run_check(config, model);
  const nlohmann::json j = to_json(report);
  write_json(out_path(config, "check.json"), {{"config", to_json(config)}, {"report", j}});
  emit(out, j);
  return report.holds_h && report.holds_hstar ? kExitOk : kExitHypothesis;
}

int cmd_dispersion(const RunConfig& config, std::ostream& out) {
  nlohmann::json doc{{"config", to_json(config)}};
  Setup s;
  if (auto code = prepare(config, s, doc)) {
    emit(out, doc);
    return *code;
  }
  const auto& samples = s.curve.samples();
  CsvWriter csv(out_path(config, "dispersion.csv"), {"s", "Delta", "Lambda"});
  for (std::size_t k = 0; k < samples.size(); ++k) {
    csv.row({s.profile.s[k], samples[k], s.profile.values[k]});
  }
  doc["curve"] = {{"max", s.curve.max()},
                  {"min", s.curve.min()},
                  {"periodicity_gap", std::abs(samples.back() - samples.front())},
                  {"ode_residual", max_ode_residual(s.curve)},
                  {"panels", s.curve.panels()}};
  write_json(out_path(config, "dispersion.json"), doc);
  if (config.svg) {
    write_svg(out_path(config, "dispersion.svg"), "dispersion curve",
              {{"Delta_r(s)", s.profile.s, samples}});
  }
  emit(out, doc);
  return kExitOk;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  nlohmann::json doc{{"config", to_json(config)}};
  Setup s;
  if (auto code = prepare(config, s, doc)) {
    emit(out, doc);
    return *code;
  }
  const int n = s.model.n;
  const PerturbationSpec pert =
      build_perturbation(config.model.perturbation, n, s.params.radius, config.seed);
  const double h_norm = norm_h(pert);

  std::vector<double> x0 = config.x0;
  double nu0 = 0.0;
  if (x0.empty()) {
    const TubePoint tp = random_tube_point(s.curve, n, config.spread_fraction, config.seed);
    x0 = tp.x;
  } else if (static_cast<int>(x0.size()) != n) {
    doc["error"] = "initial condition length differs from n";
    emit(out, doc);
    return kExitUsage;
  }
  const auto member = membership(x0, s.curve);
  if (member) {
    nu0 = member->nu;
  } else {
    for (double v : x0) nu0 += v / n;
  }

  const JointSystem system(s.model, pert);
  IntegrateOptions io;
  io.t_end = config.t_max;
  io.h = step_for(config, s.report);
  io.tube = &s.curve;
  io.record_stride = std::max<std::size_t>(config.stride, 1);
  io.strict = config.strict;
  Trajectory traj;
  try {
    traj = integrate(system, x0, nu0, io);
  } catch (const IntegrationError& e) {
    doc["error"] = e.what();
    emit(out, doc);
    return kExitSolver;
  }
  const SyncVerdict verdict = assess(traj, s.curve);
  const bool expected = verdict_expected(s.report, h_norm, s.params.radius, member.has_value());

  std::vector<std::string> header{"t"};
  for (int i = 1; i <= n; ++i) header.push_back("x_" + std::to_string(i));
  for (const char* c : {"mu", "delta", "Delta_of_mu", "min_velocity"}) header.emplace_back(c);
  CsvWriter csv(out_path(config, "trajectory.csv"), header);
  std::vector<double> row(header.size());
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const auto& st = traj.steps[k];
    row[0] = st.t;
    std::copy(st.x.begin(), st.x.end(), row.begin() + 1);
    row[n + 1] = st.mu;
    row[n + 2] = traj.delta[k];
    row[n + 3] = traj.bound[k];
    row[n + 4] = traj.velocity[k];
    csv.row(row);
  }

  doc["perturbation"] = {{"kind", pert.kind_name()}, {"norm", h_norm}, {"periodic", pert.periodic()}};
  doc["initial"] = {{"x0", x0},
                    {"nu0", nu0},
                    {"in_tube", member.has_value()},
                    {"margin", member ? nlohmann::json(member->margin) : nlohmann::json(nullptr)}};
  doc["step"] = io.h;
  doc["verdict"] = to_json(verdict);
  doc["verdict_expected"] = expected;
  doc["stopped_on_violation"] = traj.stopped_on_violation;
  if (traj.summary.first_violation_t) doc["first_violation_t"] = *traj.summary.first_violation_t;
  write_json(out_path(config, "simulate.json"), doc);
  if (config.svg) {
    std::vector<double> t;
    for (const auto& st : traj.steps) t.push_back(st.t);
    write_svg(out_path(config, "simulate.svg"), "delta vs Delta_r(mu)",
              {{"delta", t, traj.delta}, {"Delta_r(mu)", t, traj.bound, "#d62728"}});
  }
  emit(out, doc);
  return expected && !verdict.all_hold() ? kExitVerdict : kExitOk;
}

int cmd_lock(const RunConfig& config, std::ostream& out) {
  nlohmann::json doc{{"config", to_json(config)}};
  Setup s;
  if (auto code = prepare(config, s, doc)) {
    emit(out, doc);
    return *code;
  }
  const int n = s.model.n;
  const PerturbationSpec pert =
      build_perturbation(config.model.perturbation, n, s.params.radius, config.seed);
  const double h_norm = norm_h(pert);
  doc["perturbation"] = {{"kind", pert.kind_name()}, {"norm", h_norm}, {"periodic", pert.periodic()}};
  if (!pert.periodic()) {
    doc["error"] = "perturbation is not periodic along the diagonal; no return map";
    emit(out, doc);
    return kExitUsage;
  }
  if (!(h_norm < s.params.radius)) {
    doc["error"] = "perturbation norm is not below the radius r";
    emit(out, doc);
    return kExitHypothesis;
  }

  const JointSystem system(s.model, pert);
  const LockContext ctx{system, s.curve, s.report.alpha, s.report.l_total, step_for(config, s.report)};
  LockOptions lo;
  lo.tol = config.tol;
  lo.max_iter = config.max_iter;
  lo.psi_samples = config.psi_samples;
  const LockResult result = find_fixed_point(ctx, lo);
  doc["lock"] = to_json(result);
  if (!result.converged) {
    write_json(out_path(config, "lock.json"), doc);
    emit(out, doc);
    return kExitSolver;
  }
  const LockedState locked = extract_locked_state(ctx, result, config.psi_samples);
  // time is not rescaled by the normalization, phases are: x = T u
  doc["lock"]["angular_frequency_original_units"] = result.rho * kTwoPi;
  doc["lock"]["wrap_residual"] = locked.wrap_residual;

  std::vector<std::string> header{"s"};
  for (int i = 1; i <= n; ++i) header.push_back("Psi_" + std::to_string(i));
  CsvWriter csv(out_path(config, "psi.csv"), header);
  std::vector<double> row(n + 1);
  for (std::size_t k = 0; k < locked.s.size(); ++k) {
    row[0] = locked.s[k];
    std::copy(locked.psi[k].begin(), locked.psi[k].end(), row.begin() + 1);
    csv.row(row);
  }
  write_json(out_path(config, "lock.json"), doc);
  if (config.svg) {
    std::vector<SvgSeries> series;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (int i = 0; i < n; ++i) {
      SvgSeries ser{"Psi_" + std::to_string(i + 1), locked.s, {}, colors[i % 5]};
      for (const auto& p : locked.psi) ser.y.push_back(p[i]);
      series.push_back(std::move(ser));
    }
    write_svg(out_path(config, "psi.svg"), "locked state", series);
  }
  emit(out, doc);
  return result.theta_bounds_ok && result.sigma_ok ? kExitOk : kExitVerdict;
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
  SweepSpec spec;
  spec.model = config.model;
  spec.kappa = config.kappa_range;
  spec.omega = config.omega_range;
  spec.empirical = config.empirical;
  spec.probe_t = config.probe_t;
  spec.seed = config.seed;
  spec.grid = config.grid;
  const auto cells = run_sweep(spec);

  CsvWriter csv(out_path(config, "sweep.csv"),
                {"kappa", "omega", "class", "D_star", "r", "empirical_sync"});
  std::ofstream& raw = csv.stream();
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& c : cells) {
    raw << format_double(c.kappa) << ',' << format_double(c.omega) << ',' << to_string(c.classification)
        << ',' << (c.d_star ? format_double(*c.d_star) : "") << ','
        << (c.radius ? format_double(*c.radius) : "") << ','
        << (c.empirical_sync ? (*c.empirical_sync ? "true" : "false") : "") << '\n';
    const std::string key = to_string(c.classification);
    counts[key] = counts.value(key, 0) + 1;
  }
  nlohmann::json doc{{"config", to_json(config)},
                     {"cells", cells.size()},
                     {"counts", counts}};
  write_json(out_path(config, "sweep.json"), doc);
  emit(out, doc);
  return kExitOk;
}

}  // namespace mfsync
