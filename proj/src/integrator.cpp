#include "mfsync/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfsync/numerics.hpp"

namespace mfsync {

JointSystem::JointSystem(ModelSpec model, PerturbationSpec perturbation)
    : model_(std::move(model)), perturbation_(std::move(perturbation)) {
  if (!model_.period_normalized) model_ = normalize_period(model_);
  if (perturbation_.n() != model_.n) {
    throw std::invalid_argument("perturbation size does not match the model");
  }
  h_buf_.resize(static_cast<std::size_t>(model_.n));
}

void JointSystem::rhs(std::span<const double> y, std::span<double> dy) const {
  const auto n = static_cast<std::size_t>(model_.n);
  const auto x = y.first(n);
  // zs = (x_1..x_N, mu) is exactly y, so the field is evaluated in one batch.
  model_.field(x, y, dy);
  perturbation_.eval_h(x, h_buf_);
  for (std::size_t i = 0; i < n; ++i) dy[i] += h_buf_[i];
  for (std::size_t i = 0; i <= n; ++i) {
    if (!std::isfinite(dy[i])) {
      std::ostringstream msg;
      msg << "non-finite right-hand side in component " << i;
      throw IntegrationError(msg.str());
    }
  }
}

std::vector<double> JointSystem::rhs(const JointState& state) const {
  std::vector<double> y(state.x);
  y.push_back(state.mu);
  std::vector<double> dy(y.size());
  rhs(y, dy);
  return dy;
}

double default_step(double alpha, double l_total) {
  return std::min(0.01 / l_total, 0.001 / alpha);
}

namespace {

struct StepPlan {
  std::size_t full = 0;
  double tail = 0.0;
};

// Whole steps of size h up to t plus a shorter last step; leftovers from
// rounding t / h are absorbed so a horizon of k*h takes exactly k steps.
StepPlan plan_steps(double t, double h) {
  StepPlan plan;
  plan.full = static_cast<std::size_t>(std::floor(t / h));
  plan.tail = t - static_cast<double>(plan.full) * h;
  if (plan.tail <= 1e-9 * h) {
    plan.tail = 0.0;
  } else if (h - plan.tail <= 1e-9 * h) {
    ++plan.full;
    plan.tail = 0.0;
  }
  return plan;
}

// Fixed-step RK4 over the packed joint vector; owns its stage buffers.
class Rk4 {
 public:
  explicit Rk4(const JointSystem& system)
      : system_(system), k2_(dim()), k3_(dim()), k4_(dim()), tmp_(dim()) {}

  std::size_t dim() const { return static_cast<std::size_t>(system_.n()) + 1; }

  // y_out = y + RK4 increment; k1 is the derivative at y.
  void step(std::span<const double> y, std::span<const double> k1, double h,
            std::span<double> y_out) {
    const std::size_t d = dim();
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k1[i];
    system_.rhs(tmp_, k2_);
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
    system_.rhs(tmp_, k3_);
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + h * k3_[i];
    system_.rhs(tmp_, k4_);
    for (std::size_t i = 0; i < d; ++i) {
      y_out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
      if (!std::isfinite(y_out[i])) throw IntegrationError("non-finite state");
    }
  }

 private:
  const JointSystem& system_;
  std::vector<double> k2_, k3_, k4_, tmp_;
};

std::vector<double> pack(std::span<const double> x, double mu) {
  std::vector<double> y(x.begin(), x.end());
  y.push_back(mu);
  return y;
}

JointState unpack(double t, std::span<const double> y) {
  JointState s;
  s.t = t;
  s.x.assign(y.begin(), y.end() - 1);
  s.mu = y.back();
  return s;
}

double max_deviation(std::span<const double> y) {
  const double mu = y.back();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) worst = std::max(worst, std::abs(y[i] - mu));
  return worst;
}

double spread(std::span<const double> y) {
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end() - 1);
  return *hi - *lo;
}

double min_velocity(std::span<const double> dy) {
  return *std::min_element(dy.begin(), dy.end() - 1);
}

void require_start(const JointSystem& system, std::span<const double> x0, double h) {
  if (x0.size() != static_cast<std::size_t>(system.n())) {
    throw std::invalid_argument("initial state size does not match the model");
  }
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
}

}  // namespace

Trajectory integrate(const JointSystem& system, std::span<const double> x0, double nu0,
                     const IntegrateOptions& options) {
  require_start(system, x0, options.h);
  if (!(options.t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
  const std::size_t stride = std::max<std::size_t>(options.record_stride, 1);

  Trajectory traj;
  if (options.tube) traj.tube = options.tube->params();

  Rk4 rk(system);
  std::vector<double> y = pack(x0, nu0);
  std::vector<double> dy(y.size());
  std::vector<double> y_next(y.size());
  system.rhs(y, dy);

  auto observe = [&](double t, bool record) {
    const double delta = max_deviation(y);
    const double vel = min_velocity(dy);
    double bound = std::numeric_limits<double>::quiet_NaN();
    auto& sum = traj.summary;
    ++sum.steps;
    sum.min_velocity = std::min(sum.min_velocity, vel);
    sum.max_spread = std::max(sum.max_spread, spread(y));
    sum.max_delta = std::max(sum.max_delta, delta);
    bool violated = false;
    if (options.tube) {
      bound = options.tube->value(y.back());
      const double margin = bound - delta;
      sum.min_margin = std::min(sum.min_margin, margin);
      if (!(margin > kStrictMargin)) {
        violated = true;
        ++sum.violations;
        if (!sum.first_violation_t) sum.first_violation_t = t;
      }
    }
    if (record || (violated && traj.summary.violations == 1)) {
      traj.steps.push_back(unpack(t, y));
      traj.delta.push_back(delta);
      traj.bound.push_back(bound);
      traj.velocity.push_back(vel);
    }
    return violated;
  };

  const auto [full_steps, tail] = plan_steps(options.t_end, options.h);
  const bool has_tail = tail > 0.0;
  const std::size_t total = full_steps + (has_tail ? 1 : 0);

  if (observe(0.0, true) && options.strict) {
    traj.stopped_on_violation = true;
    return traj;
  }
  for (std::size_t k = 1; k <= total; ++k) {
    const bool last = k == total;
    const double h = (last && has_tail) ? tail : options.h;
    const double t = last ? options.t_end : static_cast<double>(k) * options.h;
    rk.step(y, dy, h, y_next);
    y.swap(y_next);
    system.rhs(y, dy);
    const bool violated = observe(t, last || k % stride == 0);
    if (violated && options.strict) {
      traj.stopped_on_violation = true;
      break;
    }
  }
  return traj;
}

JointState flow_to(const JointSystem& system, std::span<const double> x0, double mu0, double t,
                   double h) {
  require_start(system, x0, h);
  Rk4 rk(system);
  std::vector<double> y = pack(x0, mu0);
  std::vector<double> dy(y.size());
  std::vector<double> y_next(y.size());
  const auto [full_steps, tail] = plan_steps(t, h);
  for (std::size_t k = 0; k < full_steps; ++k) {
    system.rhs(y, dy);
    rk.step(y, dy, h, y_next);
    y.swap(y_next);
  }
  if (tail > 0.0) {
    system.rhs(y, dy);
    rk.step(y, dy, tail, y_next);
    y.swap(y_next);
  }
  return unpack(t, y);
}

Crossing refine_crossing(const JointState& a, std::span<const double> da, const JointState& b,
                         std::span<const double> db, double level) {
  const double w = b.t - a.t;
  const std::size_t n = a.x.size();
  auto mu_at = [&](double u) { return hermite(a.mu, da[n] * w, b.mu, db[n] * w, u); };
  double lo = 0.0;
  double hi = 1.0;
  double u = 0.5;
  for (int it = 0; it < 200; ++it) {
    u = 0.5 * (lo + hi);
    const double v = mu_at(u) - level;
    if (std::abs(v) < 1e-13 || hi - lo < 1e-16) break;
    if (v < 0.0) {
      lo = u;
    } else {
      hi = u;
    }
  }
  Crossing c;
  c.t = a.t + u * w;
  c.state.t = c.t;
  c.state.mu = mu_at(u);
  c.state.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.state.x[i] = hermite(a.x[i], da[i] * w, b.x[i], db[i] * w, u);
  }
  return c;
}

std::optional<Crossing> cross_time(const JointSystem& system, std::span<const double> x0,
                                   double mu0, double level, double t_max, double h,
                                   const DispersionCurve* tube) {
  require_start(system, x0, h);
  Rk4 rk(system);
  std::vector<double> y = pack(x0, mu0);
  std::vector<double> dy(y.size());
  std::vector<double> y_next(y.size());
  std::vector<double> dy_next(y.size());
  system.rhs(y, dy);
  if (y.back() >= level) return Crossing{0.0, unpack(0.0, y)};

  const auto max_steps = static_cast<std::size_t>(std::ceil(t_max / h));
  for (std::size_t k = 0; k < max_steps; ++k) {
    if (tube && max_deviation(y) < tube->value(y.back()) && !(dy.back() > 0.0)) {
      std::ostringstream msg;
      msg << "companion solution not increasing inside the tube at t = "
          << static_cast<double>(k) * h << " (dmu/dt = " << dy.back() << ")";
      throw IntegrationError(msg.str());
    }
    rk.step(y, dy, h, y_next);
    system.rhs(y_next, dy_next);
    if (y_next.back() >= level) {
      const JointState a = unpack(static_cast<double>(k) * h, y);
      const JointState b = unpack(static_cast<double>(k + 1) * h, y_next);
      return refine_crossing(a, dy, b, dy_next, level);
    }
    y.swap(y_next);
    dy.swap(dy_next);
  }
  return std::nullopt;
}

}  // namespace mfsync
