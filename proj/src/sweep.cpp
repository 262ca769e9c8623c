#include "mfsync/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

#include "mfsync/dispersion.hpp"
#include "mfsync/hypotheses.hpp"
#include "mfsync/integrator.hpp"
#include "mfsync/sync_analysis.hpp"

namespace mfsync {

std::string to_string(CellClass c) {
  switch (c) {
    case CellClass::h_fail: return "H-fail";
    case CellClass::hstar_fail: return "Hstar-fail";
    case CellClass::both_hold: return "both-hold";
    case CellClass::numerical_failure: return "numerical-failure";
  }
  return "numerical-failure";
}

std::vector<double> linspace(const SweepRange& range) {
  std::vector<double> v(std::max(range.count, 0));
  if (v.size() == 1) v[0] = range.min;
  for (std::size_t i = 0; v.size() > 1 && i < v.size(); ++i) {
    v[i] = range.min + (range.max - range.min) * static_cast<double>(i) / (v.size() - 1);
  }
  return v;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MEANFIELD_SYNC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = cap;
  }
  return std::max(n, 1);
}

SweepCell evaluate_cell(const SweepSpec& spec, double kappa, double omega, std::uint64_t seed) {
  SweepCell cell;
  cell.kappa = kappa;
  cell.omega = omega;
  try {
    ModelConfig mc = spec.model;
    mc.kappa = kappa;
    mc.omega = omega;
    const ModelSpec model = build_model(mc);
    HypothesisOptions opt;
    opt.profile_panels = spec.grid;
    const HypothesisReport report = check_hypotheses(model, opt);
    if (!report.holds_h) {
      cell.classification = CellClass::h_fail;
      return cell;
    }
    if (!report.holds_hstar) {
      cell.classification = CellClass::hstar_fail;
      return cell;
    }
    const DispersionParams params = make_dispersion_params(report);
    cell.classification = CellClass::both_hold;
    cell.d_star = params.d_star;
    cell.radius = params.radius;
    if (spec.empirical) {
      const LambdaProfile profile = build_lambda_profile(model, spec.grid);
      const DispersionCurve curve = build_curve(profile, params);
      const TubePoint start = random_tube_point(curve, model.n, 0.5, seed);
      const JointSystem system(model, PerturbationSpec::zero(model.n));
      IntegrateOptions io;
      io.t_end = spec.probe_t;
      io.h = default_step(report.alpha, report.l_total);
      io.tube = &curve;
      io.record_stride = 1000;
      const Trajectory traj = integrate(system, start.x, start.nu, io);
      cell.empirical_sync = assess(traj, curve).all_hold();
    }
  } catch (const std::exception& e) {
    cell.classification = CellClass::numerical_failure;
    cell.d_star.reset();
    cell.radius.reset();
    cell.note = e.what();
  }
  return cell;
}

std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
  const auto kappas = linspace(spec.kappa);
  const auto omegas = linspace(spec.omega);
  std::vector<SweepCell> cells(kappas.size() * omegas.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < cells.size();) {
      const std::size_t i = k / omegas.size();
      const std::size_t j = k % omegas.size();
      // per-cell seed, independent of scheduling
      cells[k] = evaluate_cell(spec, kappas[i], omegas[j], spec.seed + 0x9e3779b97f4a7c15ULL * (k + 1));
    }
  };
  const int workers =
      std::min<int>(spec.threads > 0 ? spec.threads : worker_count(), std::max<std::size_t>(cells.size(), 1));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return cells;
}

}  // namespace mfsync
