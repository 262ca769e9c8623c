#include <doctest.h>

#include <vector>

#include "mfsync/sync_analysis.hpp"

using namespace mfsync;

namespace {

struct Setup {
  ModelSpec model;
  HypothesisReport report;
  DispersionParams params;
  DispersionCurve curve;
};

Setup setup(const ModelSpec& m) {
  Setup s{m, check_hypotheses(m), {}, {}};
  s.params = make_dispersion_params(s.report);
  s.curve = build_curve(build_lambda_profile(m, 2048), s.params);
  return s;
}

Trajectory run(const Setup& s, const PerturbationSpec& p, const std::vector<double>& x0, double nu0,
               double t_end, std::size_t stride) {
  const JointSystem sys(s.model, p);
  IntegrateOptions opt;
  opt.t_end = t_end;
  opt.h = default_step(s.report.alpha, s.report.l_total);
  opt.tube = &s.curve;
  opt.record_stride = stride;
  return integrate(sys, x0, nu0, opt);
}

}  // namespace

TEST_CASE("Kuramoto in-tube start synchronizes up to t = 1000") {
  const auto s = setup(builtin_kuramoto(1.0, 0.2, 5));
  const TubePoint tp = random_tube_point(s.curve, 5, 0.8, 17);
  const auto m = membership(tp.x, s.curve);
  REQUIRE(m);
  const auto traj = run(s, PerturbationSpec::zero(5), tp.x, m->nu, 1000.0, 100);
  const auto v = assess(traj, s.curve);
  CHECK(v.invariant);
  CHECK(v.dynamical);
  CHECK(v.spread_ok);
  CHECK(v.all_hold());
  CHECK(v.violations == 0);
  CHECK(v.steps_checked == traj.summary.steps);
  CHECK(v.max_spread < 2 * s.params.d);
  CHECK(verdict_expected(s.report, 0.0, s.params.radius, true));
}

TEST_CASE("a diagonal start stays on the diagonal") {
  const auto s = setup(builtin_winfree(2.0, 1.0, 4));
  const std::vector<double> x0(4, 0.25);
  const auto traj = run(s, PerturbationSpec::zero(4), x0, 0.25, 20.0, 10);
  for (double d : traj.delta) CHECK(d == 0.0);
  const auto v = assess(traj, s.curve);
  CHECK(v.min_margin == doctest::Approx(s.curve.min()).epsilon(1e-8));
  CHECK(v.max_spread == 0.0);
  CHECK(v.all_hold());
}

TEST_CASE("falsification probe: far outside the budget") {
  const auto s = setup(builtin_kuramoto(1.0, 0.2, 3));
  const double a = 100 * s.params.radius;
  const auto p = PerturbationSpec::constant_detune({a, 0.0, -a});
  const std::vector<double> x0(3, 0.0);
  // only the endpoints are recorded; the running summary still sees every step
  const auto traj = run(s, p, x0, 0.0, 200.0, 1u << 30);
  const auto v = assess(traj, s.curve);
  CHECK_FALSE(verdict_expected(s.report, norm_h(p), s.params.radius, true));
  // no claim either way about the outcome, only internal consistency
  if (v.invariant) CHECK(v.spread_ok);
  CHECK((v.violations > 0) == !v.invariant);
  CHECK(v.steps_checked == traj.summary.steps);
}

TEST_CASE("invariant implies spread_ok on every verdict") {
  const auto s = setup(builtin_winfree(2.0, 1.0, 3));
  for (double scale : {0.0, 0.5, 5.0, 500.0}) {
    const double a = scale * s.params.radius;
    const auto traj = run(s, PerturbationSpec::constant_detune({a, -a, 0.0}), {0.0, 0.0, 0.0}, 0.0, 30.0, 50);
    const auto v = assess(traj, s.curve);
    if (v.invariant) CHECK(v.spread_ok);
  }
}

TEST_CASE("assess rejects a trajectory checked against another tube") {
  const auto s = setup(builtin_kuramoto(1.0, 0.2, 3));
  const auto traj = run(s, PerturbationSpec::zero(3), {0.0, 0.0, 0.0}, 0.0, 1.0, 1);
  auto other_params = make_dispersion_params(s.report, 0.5 * s.params.d_star);
  const auto other = build_curve(build_lambda_profile(s.model, 2048), other_params);
  CHECK_THROWS_AS(assess(traj, other), std::invalid_argument);

  Trajectory untubed = traj;
  untubed.tube.reset();
  CHECK_THROWS_AS(assess(untubed, s.curve), std::invalid_argument);

  Trajectory ragged = traj;
  ragged.delta.pop_back();
  CHECK_THROWS_AS(assess(ragged, s.curve), std::invalid_argument);
}

TEST_CASE("verdict_expected needs every premise") {
  HypothesisReport r;
  r.holds_h = r.holds_hstar = true;
  CHECK(verdict_expected(r, 0.5, 1.0, true));
  CHECK_FALSE(verdict_expected(r, 1.0, 1.0, true));
  CHECK_FALSE(verdict_expected(r, 0.5, 1.0, false));
  r.holds_hstar = false;
  CHECK_FALSE(verdict_expected(r, 0.5, 1.0, true));
}
