#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mfsync/integrator.hpp"

using namespace mfsync;

TEST_CASE("decoupled rotation is integrated exactly") {
  const double omega = 1.7;
  const std::vector<double> w{0.01, -0.02, 0.01};
  const JointSystem sys(builtin_kuramoto(omega, 0.0, 3), PerturbationSpec::constant_detune(w));
  const std::vector<double> x0{0.1, 0.5, -0.3};
  IntegrateOptions opt;
  opt.t_end = 100.0;
  opt.h = 0.013;
  opt.record_stride = 1000;
  const auto traj = integrate(sys, x0, 0.2, opt);
  const auto& last = traj.steps.back();
  CHECK(last.t == 100.0);
  const double v = omega / kTwoPi;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(last.x[i] - (x0[i] + (v + w[i]) * 100.0)) < 1e-10);
  CHECK(std::abs(last.mu - (0.2 + v * 100.0)) < 1e-10);
}

TEST_CASE("crossing time of the rigid rotation is 2 pi / omega") {
  for (double omega : {0.5, 1.0, 3.0}) {
    const JointSystem sys(builtin_kuramoto(omega, 0.0, 2), PerturbationSpec::zero(2));
    const std::vector<double> x0{0.0, 0.0};
    const auto c = cross_time(sys, x0, 0.0, 1.0, 100.0, 0.01);
    REQUIRE(c);
    CHECK(c->t == doctest::Approx(kTwoPi / omega).epsilon(1e-12));
    CHECK(c->state.mu == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_FALSE(cross_time(sys, x0, 0.0, 1.0, 0.5 * kTwoPi / omega, 0.01));
  }
}

TEST_CASE("the diagonal is invariant without perturbation") {
  const JointSystem sys(builtin_kuramoto(1.0, 0.2, 4), PerturbationSpec::zero(4));
  const std::vector<double> x0(4, 0.3);
  const auto end = flow_to(sys, x0, 0.3, 25.0, 0.01);
  for (double xi : end.x) CHECK(xi == doctest::Approx(0.3 + 25.0 / kTwoPi).epsilon(1e-13));
  CHECK(end.mu == doctest::Approx(end.x[0]).epsilon(1e-15));
}

TEST_CASE("RK4 step-halving ratio near 16") {
  const JointSystem sys(builtin_kuramoto(1.0, 0.6, 5), PerturbationSpec::zero(5));
  const std::vector<double> x0{0.0, 0.1, 0.2, 0.3, 0.45};
  auto at = [&](double h) { return flow_to(sys, x0, 0.0, 10.0, h).x[4]; };
  const double a = at(0.2), b = at(0.1), c = at(0.05);
  const double ratio = (a - b) / (b - c);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("flow composes across partial steps") {
  const JointSystem sys(builtin_winfree(2.0, 1.0, 3),
                        PerturbationSpec::trigonometric(1e-3, 1.0, {0.0, 1.0, 2.0}));
  const std::vector<double> x0{0.01, 0.0, -0.01};
  const double h = 1e-3;
  const auto mid = flow_to(sys, x0, 0.0, 0.75, h);
  const auto two = flow_to(sys, mid.x, mid.mu, 0.5, h);
  const auto one = flow_to(sys, x0, 0.0, 1.25, h);
  for (int i = 0; i < 3; ++i) CHECK(two.x[i] == doctest::Approx(one.x[i]).epsilon(1e-12));
  CHECK(one.t == 1.25);
}

TEST_CASE("recording: stride, exact step times, first and last kept") {
  const JointSystem sys(builtin_kuramoto(1.0, 0.2, 2), PerturbationSpec::zero(2));
  const std::vector<double> x0{0.0, 0.001};
  IntegrateOptions opt;
  opt.t_end = 1.05;
  opt.h = 0.1;
  opt.record_stride = 3;
  const auto traj = integrate(sys, x0, 0.0, opt);
  std::vector<double> t;
  for (const auto& s : traj.steps) t.push_back(s.t);
  // ten full steps and a tail
  const std::vector<double> expect{0.0, 0.30000000000000004, 0.6000000000000001, 0.9, 1.05};
  REQUIRE(t.size() == expect.size());
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(t[k] == doctest::Approx(expect[k]).epsilon(1e-15));
  CHECK(traj.summary.steps == 12);
  CHECK(traj.delta.size() == t.size());
  CHECK(std::isnan(traj.bound[0]));
  CHECK_FALSE(traj.tube);

  // a horizon that is a multiple of h up to rounding takes no sliver step
  opt.t_end = 0.1 * 7;
  opt.record_stride = 1;
  CHECK(integrate(sys, x0, 0.0, opt).steps.size() == 8);
}

TEST_CASE("tube violations are counted, or stop the run when strict") {
  const auto model = builtin_kuramoto(1.0, 0.2, 3);
  const auto report = check_hypotheses(model);
  const auto params = make_dispersion_params(report);
  const auto curve = build_curve(build_lambda_profile(model, 512), params);
  // detunes a hundred times the budget push the phases out of the tube
  const double a = 100 * params.radius;
  const JointSystem sys(model, PerturbationSpec::constant_detune({a, 0.0, -a}));
  const std::vector<double> x0(3, 0.0);
  IntegrateOptions opt;
  opt.t_end = 50.0;
  opt.h = 0.01;
  opt.tube = &curve;
  opt.record_stride = 500;
  const auto loose = integrate(sys, x0, 0.0, opt);
  CHECK(loose.summary.violations > 0);
  CHECK(loose.summary.min_margin < 0.0);
  REQUIRE(loose.summary.first_violation_t);
  CHECK_FALSE(loose.stopped_on_violation);
  CHECK(loose.tube->d == params.d);

  opt.strict = true;
  const auto strict = integrate(sys, x0, 0.0, opt);
  CHECK(strict.stopped_on_violation);
  CHECK(strict.steps.back().t == doctest::Approx(*loose.summary.first_violation_t));
  CHECK(strict.summary.violations == 1);
}

TEST_CASE("errors") {
  const auto model = builtin_kuramoto(1.0, 0.2, 3);
  CHECK_THROWS_AS(JointSystem(model, PerturbationSpec::zero(4)), std::invalid_argument);

  ModelSpec bad;
  bad.n = 2;
  bad.period_normalized = true;
  bad.eval_f = [](std::span<const double>, double z) { return z > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
  bad.eval_df_z = [](std::span<const double>, double) { return 0.0; };
  const JointSystem nan_sys(bad, PerturbationSpec::zero(2));
  const std::vector<double> x0{0.0, 0.0};
  CHECK_THROWS_AS(flow_to(nan_sys, x0, 0.0, 1.0, 0.01), IntegrationError);

  // mu running backwards inside a tube contradicts (H)
  const auto report = check_hypotheses(model);
  const auto curve = build_curve(build_lambda_profile(model, 256), make_dispersion_params(report));
  const JointSystem backwards(normalize_period(make_trig_model(3, -1.0, {})), PerturbationSpec::zero(3));
  const std::vector<double> z3(3, 0.0);
  CHECK_THROWS_AS(cross_time(backwards, z3, 0.0, 1.0, 10.0, 0.01, &curve), IntegrationError);
  CHECK_FALSE(cross_time(backwards, z3, 0.0, 1.0, 10.0, 0.01));
}

TEST_CASE("default step") {
  CHECK(default_step(0.1, 15.0) == doctest::Approx(0.01 / 15.0));
  CHECK(default_step(0.5, 1.0) == doctest::Approx(0.002));
}
