#include "mfsync/locking.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace mfsync {

namespace {

double sup_norm_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

struct Sampled {
  std::vector<double> grid;
  std::vector<std::vector<double>> psi;
  double wrap_residual = 0.0;
};

// Psi on a uniform grid over [0, periods * theta*]; the integration step
// divides the sample spacing so every sample lands on a step.
Sampled sample_psi(const LockContext& ctx, std::span<const double> x_star, double theta,
                   int samples, int periods) {
  const double spacing = theta / samples;
  const int sub = std::max(1, static_cast<int>(std::ceil(spacing / ctx.h)));
  IntegrateOptions opts;
  opts.h = spacing / sub;
  opts.t_end = periods * theta;
  opts.record_stride = static_cast<std::size_t>(sub);
  const Trajectory traj = integrate(ctx.system, x_star, 0.0, opts);

  Sampled out;
  for (const auto& st : traj.steps) {
    out.grid.push_back(st.t);
    std::vector<double> row(st.x.size());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = st.x[i] - st.t / theta;
    out.psi.push_back(std::move(row));
  }
  for (std::size_t k = 0; k + samples < out.psi.size(); ++k) {
    out.wrap_residual =
        std::max(out.wrap_residual, sup_norm_diff(out.psi[k + samples], out.psi[k]));
  }
  return out;
}

}  // namespace

PoincareResult poincare(const LockContext& ctx, std::span<const double> x, double mu0) {
  const double t_max = 3.0 / ctx.alpha;
  const auto crossing = cross_time(ctx.system, x, mu0, mu0 + 1.0, t_max, ctx.h, &ctx.curve);
  if (!crossing) {
    std::ostringstream msg;
    msg << "companion solution did not advance one period within 3/alpha = " << t_max;
    throw SolverError(msg.str());
  }
  PoincareResult r;
  r.theta = crossing->t;
  r.p = crossing->state.x;
  for (double& v : r.p) v -= 1.0;
  double dev = 0.0;
  for (double v : r.p) dev = std::max(dev, std::abs(v - mu0));
  r.in_sigma = dev < ctx.curve.value(mu0);
  r.theta_in_bounds = r.theta > 1.0 / ctx.l_total && r.theta < 2.0 / ctx.alpha;
  return r;
}

LockResult find_fixed_point(const LockContext& ctx, const LockOptions& options) {
  const auto n = static_cast<std::size_t>(ctx.system.n());
  LockResult res;

  auto evaluate = [&](std::span<const double> x) {
    PoincareResult pr = poincare(ctx, x);
    res.thetas.push_back(pr.theta);
    res.theta_bounds_ok = res.theta_bounds_ok && pr.theta_in_bounds;
    res.sigma_ok = res.sigma_ok && pr.in_sigma;
    return pr;
  };

  std::vector<double> x(n, 0.0);
  std::vector<double> best_x = x;
  double best_residual = std::numeric_limits<double>::infinity();

  try {
    for (int it = 0; it < options.max_iter; ++it) {
      const PoincareResult pr = evaluate(x);
      const double r = sup_norm_diff(pr.p, x);
      res.iterations = it + 1;
      if (r < best_residual) {
        best_residual = r;
        best_x = x;
      }
      if (r < options.tol) {
        res.converged = true;
        res.method = "picard";
        res.x_star = x;
        res.theta_star = pr.theta;
        res.residual = r;
        break;
      }
      x = pr.p;
    }

    if (!res.converged) {
      // G(x) = P(x) - x; Jacobian by forward differences.
      x = best_x;
      const double fd = std::min(options.fd_step, 1e-2 * ctx.curve.value(0.0));
      PoincareResult pr = evaluate(x);
      Eigen::VectorXd g(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = pr.p[i] - x[i];
      for (int it = 0; it < options.newton_max_iter; ++it) {
        res.iterations += 1;
        if (g.cwiseAbs().maxCoeff() < options.tol) {
          res.converged = true;
          break;
        }
        Eigen::MatrixXd jac(n, n);
        for (std::size_t j = 0; j < n; ++j) {
          std::vector<double> xp = x;
          xp[j] += fd;
          const PoincareResult pj = evaluate(xp);
          for (std::size_t i = 0; i < n; ++i) jac(i, j) = ((pj.p[i] - xp[i]) - g[i]) / fd;
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(-g);
        const double g_norm = g.cwiseAbs().maxCoeff();
        double damping = 1.0;
        bool accepted = false;
        for (int half = 0; half < 30 && !accepted; ++half, damping *= 0.5) {
          std::vector<double> trial = x;
          for (std::size_t i = 0; i < n; ++i) trial[i] += damping * step[i];
          const PoincareResult pt = evaluate(trial);
          Eigen::VectorXd gt(n);
          for (std::size_t i = 0; i < n; ++i) gt[i] = pt.p[i] - trial[i];
          if (gt.cwiseAbs().maxCoeff() < g_norm) {
            x = trial;
            g = gt;
            pr = pt;
            accepted = true;
          }
        }
        if (!accepted) break;
      }
      best_residual = g.cwiseAbs().maxCoeff();
      if (res.converged) {
        res.method = "newton";
        res.x_star = x;
        res.theta_star = pr.theta;
        res.residual = best_residual;
      }
    }
  } catch (const SolverError& e) {
    res.message = e.what();
  } catch (const IntegrationError& e) {
    res.message = e.what();
  }

  if (!res.converged) {
    if (res.message.empty()) {
      std::ostringstream msg;
      msg << "no fixed point to tolerance " << options.tol << "; last residual " << best_residual;
      res.message = msg.str();
    }
    res.residual = best_residual;
    res.x_star = best_x;
    return res;
  }

  res.rho = 1.0 / res.theta_star;
  const Sampled psi = sample_psi(ctx, res.x_star, res.theta_star, options.psi_samples, 2);
  res.psi_grid = psi.grid;
  res.psi_samples = psi.psi;
  res.periodicity_residual = psi.wrap_residual;
  return res;
}

LockedState extract_locked_state(const LockContext& ctx, const LockResult& result, int samples) {
  if (!result.converged) throw std::invalid_argument("locked state needs a converged fixed point");
  if (samples < 1) throw std::invalid_argument("need at least one sample per period");
  Sampled psi = sample_psi(ctx, result.x_star, result.theta_star, samples, 2);
  LockedState out;
  out.rho = 1.0 / result.theta_star;
  out.wrap_residual = psi.wrap_residual;
  const auto keep = std::min(psi.grid.size(), static_cast<std::size_t>(samples) + 1);
  out.s.assign(psi.grid.begin(), psi.grid.begin() + keep);
  out.psi.assign(psi.psi.begin(), psi.psi.begin() + keep);
  return out;
}

double orbit_shift_defect(const LockContext& ctx, const LockResult& result, int count) {
  const double theta = result.theta_star;
  const JointState shifted = flow_to(ctx.system, result.x_star, 0.0, theta, ctx.h);
  double worst = 0.0;
  for (int j = 0; j < count; ++j) {
    const double t = 2.0 * theta * j / count;
    const JointState a = flow_to(ctx.system, shifted.x, shifted.mu, t, ctx.h);
    const JointState b = flow_to(ctx.system, result.x_star, 0.0, t, ctx.h);
    for (std::size_t i = 0; i < a.x.size(); ++i) {
      worst = std::max(worst, std::abs(a.x[i] - b.x[i] - 1.0));
    }
  }
  return worst;
}

double frequency_error(const LockContext& ctx, const LockResult& result, int periods) {
  const double horizon = periods * result.theta_star;
  const JointState end = flow_to(ctx.system, result.x_star, 0.0, horizon, ctx.h);
  const double rho = 1.0 / result.theta_star;
  double worst = 0.0;
  for (std::size_t i = 0; i < end.x.size(); ++i) {
    worst = std::max(worst, std::abs((end.x[i] - result.x_star[i]) / horizon - rho));
  }
  return worst;
}

}  // namespace mfsync
