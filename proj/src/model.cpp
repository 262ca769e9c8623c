#include "mfsync/model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>

#include "mfsync/numerics.hpp"

namespace mfsync {

namespace {

// cos and sin of 2 pi u. Reduces u to the nearest quarter turn exactly, then
// Taylor polynomials on |v| <= pi/4; truncation is below 1e-16.
inline void turn_sincos(double u, double& c, double& s) {
  const double t = 4.0 * u;
  const auto k = static_cast<long long>(t < 0.0 ? t - 0.5 : t + 0.5);
  const double v = kTwoPi * (u - 0.25 * static_cast<double>(k));
  const double v2 = v * v;
  const double sv =
      v * (1.0 + v2 * (-1.0 / 6 + v2 * (1.0 / 120 + v2 * (-1.0 / 5040 + v2 * (1.0 / 362880 +
          v2 * (-1.0 / 39916800 + v2 * (1.0 / 6227020800 + v2 * (-1.0 / 1307674368000))))))));
  const double cv =
      1.0 + v2 * (-0.5 + v2 * (1.0 / 24 + v2 * (-1.0 / 720 + v2 * (1.0 / 40320 + v2 * (-1.0 / 3628800 +
          v2 * (1.0 / 479001600 + v2 * (-1.0 / 87178291200 + v2 * (1.0 / 20922789888000))))))));
  const auto quadrant = k & 3;
  const double c0 = (quadrant & 1) ? sv : cv;
  const double s0 = (quadrant & 1) ? cv : sv;
  c = ((quadrant + 1) & 2) ? -c0 : c0;
  s = (quadrant & 2) ? -s0 : s0;
}

}  // namespace

void ModelSpec::field(std::span<const double> y, std::span<const double> zs,
                      std::span<double> out) const {
  if (eval_field) {
    eval_field(y, zs, out);
    return;
  }
  for (std::size_t i = 0; i < zs.size(); ++i) out[i] = eval_f(y, zs[i]);
}

double ModelSpec::diagonal(double s) const {
  const std::vector<double> y(static_cast<std::size_t>(n), s);
  return eval_f(y, s);
}

double ModelSpec::diagonal_df_z(double s) const {
  const std::vector<double> y(static_cast<std::size_t>(n), s);
  return eval_df_z(y, s);
}

namespace {

// Shared evaluation state for a trigonometric mean-field coupling.
struct TrigModel {
  int n;
  double omega;
  std::vector<TrigTerm> terms;
  // Distinct nonzero frequencies, and for every term the slot of its y / z
  // frequency in that list (-1 when the factor is constant).
  std::vector<int> freqs;
  std::vector<int> y_slot;
  std::vector<int> z_slot;
  // Unit mode takes period-normalized phases u and returns F(2 pi U, 2 pi u) / 2 pi.
  bool unit;

  // At fixed Y the coupling collapses to
  // F(Y, z) = base + sum_q ac[q] cos(f_q z) + as[q] sin(f_q z).
  struct Collapsed {
    double base = 0.0;
    std::vector<double> ac;
    std::vector<double> as;
  };

  TrigModel(int n_, double omega_, std::vector<TrigTerm> terms_, bool unit_)
      : n(n_), omega(omega_), terms(std::move(terms_)), unit(unit_) {
    auto slot_of = [this](TrigFn fn, int f) {
      if (fn == TrigFn::one || f == 0) return -1;
      auto it = std::find(freqs.begin(), freqs.end(), f);
      if (it != freqs.end()) return static_cast<int>(it - freqs.begin());
      freqs.push_back(f);
      return static_cast<int>(freqs.size()) - 1;
    };
    for (const auto& t : terms) {
      y_slot.push_back(slot_of(t.y_fn, t.m));
      z_slot.push_back(slot_of(t.z_fn, t.k));
    }
  }

  // cos and sin of f x; in unit mode of 2 pi f u, reduced in turns, which is
  // exact for integer f and much cheaper than reducing large radians.
  [[gnu::always_inline]] void angle(int f, double x, double& c, double& s) const {
    if (unit) {
      turn_sincos(f * x, c, s);
      return;
    }
    c = std::cos(f * x);
    s = std::sin(f * x);
  }

  [[nodiscard]] double out_scale() const { return unit ? 1.0 / kTwoPi : 1.0; }

  void sums(std::span<const double> y, std::vector<double>& csum, std::vector<double>& ssum) const {
    csum.assign(freqs.size(), 0.0);
    ssum.assign(freqs.size(), 0.0);
    for (double yj : y) {
      for (std::size_t q = 0; q < freqs.size(); ++q) {
        double c, s;
        angle(freqs[q], yj, c, s);
        csum[q] += c;
        ssum[q] += s;
      }
    }
  }

  // Fills base and the per-frequency coefficients ac, as from the population sums.
  double collapse(const double* csum, const double* ssum, double* ac, double* as) const {
    const double inv_n = 1.0 / n;
    double base = omega;
    std::fill(ac, ac + freqs.size(), 0.0);
    std::fill(as, as + freqs.size(), 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& term = terms[t];
      double mean;
      if (y_slot[t] < 0) {
        mean = term.y_fn == TrigFn::sin ? 0.0 : 1.0;
      } else {
        mean = (term.y_fn == TrigFn::cos ? csum[y_slot[t]] : ssum[y_slot[t]]) * inv_n;
      }
      const double w = term.coeff * mean;
      if (z_slot[t] < 0) {
        if (term.z_fn != TrigFn::sin) base += w;
      } else if (term.z_fn == TrigFn::cos) {
        ac[z_slot[t]] += w;
      } else {
        as[z_slot[t]] += w;
      }
    }
    return base;
  }

  Collapsed at(std::span<const double> y) const {
    std::vector<double> csum, ssum;
    sums(y, csum, ssum);
    Collapsed col;
    col.ac.resize(freqs.size());
    col.as.resize(freqs.size());
    col.base = collapse(csum.data(), ssum.data(), col.ac.data(), col.as.data());
    return col;
  }

  double value(std::span<const double> y, double z) const {
    const Collapsed col = at(y);
    double f = col.base;
    for (std::size_t q = 0; q < freqs.size(); ++q) {
      double c, s;
      angle(freqs[q], z, c, s);
      f += col.ac[q] * c + col.as[q] * s;
    }
    return f * out_scale();
  }

  // the 2 pi of the chain rule cancels the 1 / 2 pi of unit mode
  double slope_z(std::span<const double> y, double z) const {
    const Collapsed col = at(y);
    double d = 0.0;
    for (std::size_t q = 0; q < freqs.size(); ++q) {
      double c, s;
      angle(freqs[q], z, c, s);
      d += freqs[q] * (col.as[q] * c - col.ac[q] * s);
    }
    return d;
  }

  void batch(std::span<const double> y, std::span<const double> zs, std::span<double> out) const {
    const std::size_t nf = freqs.size();
    const std::size_t nz = zs.size();
    // cos/sin table per (z, frequency), then sums and coefficients, in one buffer
    thread_local std::vector<double> buf;
    buf.resize(2 * nz * nf + 4 * nf);
    double* ctab = buf.data();
    double* stab = ctab + nz * nf;
    double* csum = stab + nz * nf;
    double* ssum = csum + nf;
    double* ac = ssum + nf;
    double* as = ac + nf;
    for (std::size_t i = 0; i < nz; ++i) {
      for (std::size_t q = 0; q < nf; ++q) angle(freqs[q], zs[i], ctab[i * nf + q], stab[i * nf + q]);
    }
    std::fill(csum, csum + 2 * nf, 0.0);
    // the integrator passes zs = (y, mu), so the population sums reuse the table
    if (zs.data() == y.data() && nz >= y.size()) {
      for (std::size_t j = 0; j < y.size(); ++j) {
        for (std::size_t q = 0; q < nf; ++q) {
          csum[q] += ctab[j * nf + q];
          ssum[q] += stab[j * nf + q];
        }
      }
    } else {
      for (double yj : y) {
        for (std::size_t q = 0; q < nf; ++q) {
          double c, s;
          angle(freqs[q], yj, c, s);
          csum[q] += c;
          ssum[q] += s;
        }
      }
    }
    const double base = collapse(csum, ssum, ac, as);
    const double scale = out_scale();
    for (std::size_t i = 0; i < nz; ++i) {
      double f = base;
      const double* c = ctab + i * nf;
      const double* s = stab + i * nf;
      for (std::size_t q = 0; q < nf; ++q) f += ac[q] * c[q] + as[q] * s[q];
      out[i] = f * scale;
    }
  }
};

ModelSpec wrap_trig(std::shared_ptr<const TrigModel> impl) {
  ModelSpec m;
  m.n = impl->n;
  m.eval_f = [impl](std::span<const double> y, double z) { return impl->value(y, z); };
  m.eval_df_z = [impl](std::span<const double> y, double z) { return impl->slope_z(y, z); };
  m.eval_field = [impl](std::span<const double> y, std::span<const double> zs,
                        std::span<double> out) { impl->batch(y, zs, out); };
  m.period_normalized = impl->unit;
  m.period = impl->unit ? 1.0 : kTwoPi;
  return m;
}

NormBounds trig_bounds(int n, double omega, const std::vector<TrigTerm>& terms) {
  NormBounds b;
  b.f = std::abs(omega);
  double dy = 0.0, dz = 0.0, dyy = 0.0, dyz = 0.0, dzz = 0.0;
  for (const auto& t : terms) {
    const double c = std::abs(t.coeff);
    b.f += c;
    const double m = t.y_fn == TrigFn::one ? 0.0 : std::abs(t.m);
    const double k = t.z_fn == TrigFn::one ? 0.0 : std::abs(t.k);
    dy += c * m / n;
    dz += c * k;
    dyy += c * m * m / n;
    dyz += c * m * k / n;
    dzz += c * k * k;
  }
  b.df = std::max(dy, dz);
  b.d2f = std::max({dyy, dyz, dzz});
  return b;
}

void require_model_params(double omega, double kappa, int n) {
  if (n < 2) throw std::invalid_argument("model needs n >= 2 oscillators");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be nonnegative");
}

}  // namespace

ModelSpec make_trig_model(int n, double omega, std::vector<TrigTerm> terms, std::string name) {
  if (n < 2) throw std::invalid_argument("model needs n >= 2 oscillators");
  auto impl = std::make_shared<const TrigModel>(n, omega, std::move(terms), false);
  ModelSpec m = wrap_trig(impl);
  m.norm_bounds = trig_bounds(n, omega, impl->terms);
  m.unit_period_form = [impl] {
    return wrap_trig(std::make_shared<const TrigModel>(impl->n, impl->omega, impl->terms, true));
  };
  m.name = std::move(name);
  return m;
}

ModelSpec builtin_winfree(double omega, double kappa, int n) {
  require_model_params(omega, kappa, n);
  // omega - kappa * mean(1 + cos y_j) * sin z
  ModelSpec natural = make_trig_model(n, omega,
                                      {{-kappa, TrigFn::one, 0, TrigFn::sin, 1},
                                       {-kappa, TrigFn::cos, 1, TrigFn::sin, 1}},
                                      "winfree");
  natural.norm_bounds = NormBounds{omega + 2 * kappa, 2 * kappa, 2 * kappa};
  return normalize_period(natural, kTwoPi);
}

ModelSpec builtin_kuramoto(double omega, double kappa, int n) {
  require_model_params(omega, kappa, n);
  // omega + kappa * mean sin(y_j - z) = omega + kappa * (mean sin y cos z - mean cos y sin z)
  ModelSpec natural = make_trig_model(n, omega,
                                      {{kappa, TrigFn::sin, 1, TrigFn::cos, 1},
                                       {-kappa, TrigFn::cos, 1, TrigFn::sin, 1}},
                                      "kuramoto");
  natural.norm_bounds = NormBounds{omega + kappa, kappa, kappa};
  return normalize_period(natural, kTwoPi);
}

ModelSpec normalize_period(const ModelSpec& model) { return normalize_period(model, model.period); }

ModelSpec normalize_period(const ModelSpec& model, double period) {
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  const double T = period;
  const double inv_t = 1.0 / T;
  auto scaled_bounds = [&](ModelSpec& out) {
    if (model.norm_bounds) {
      out.norm_bounds = NormBounds{model.norm_bounds->f * inv_t, model.norm_bounds->df,
                                   model.norm_bounds->d2f * T};
    }
  };
  if (model.unit_period_form && period == model.period) {
    ModelSpec out = model.unit_period_form();
    out.name = model.name;
    scaled_bounds(out);
    return out;
  }

  ModelSpec out = model;
  out.period_normalized = true;
  out.period = 1.0;
  out.unit_period_form = nullptr;
  if (period == 1.0) return out;
  auto inner = std::make_shared<const ModelSpec>(model);
  out.eval_f = [inner, T, inv_t](std::span<const double> u, double z) {
    thread_local std::vector<double> scaled;
    scaled.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) scaled[i] = T * u[i];
    return inv_t * inner->eval_f(scaled, T * z);
  };
  out.eval_df_z = [inner, T](std::span<const double> u, double z) {
    thread_local std::vector<double> scaled;
    scaled.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) scaled[i] = T * u[i];
    return inner->eval_df_z(scaled, T * z);
  };
  out.eval_field = [inner, T, inv_t](std::span<const double> u, std::span<const double> zs,
                                     std::span<double> res) {
    thread_local std::vector<double> zbuf;
    thread_local std::vector<double> ybuf;
    zbuf.resize(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) zbuf[i] = T * zs[i];
    std::span<const double> ys;
    if (zs.data() == u.data() && zs.size() >= u.size()) {
      ys = std::span<const double>(zbuf.data(), u.size());
    } else {
      ybuf.resize(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) ybuf[i] = T * u[i];
      ys = ybuf;
    }
    inner->field(ys, zbuf, res);
    for (double& v : res) v *= inv_t;
  };
  scaled_bounds(out);
  return out;
}

std::vector<double> SlabSample::point() const {
  std::vector<double> p(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) p[i] = base + offsets[i];
  return p;
}

void for_each_slab_point(int q, const SlabSampling& sampling,
                         const std::function<void(std::span<const double>)>& visit) {
  if (q < 1) throw std::invalid_argument("slab dimension must be positive");
  const int g = std::max(sampling.grid, 2);
  const double total = std::pow(static_cast<double>(g), q + 1);
  SlabSample sample;
  sample.offsets.assign(static_cast<std::size_t>(q), 0.0);
  std::vector<double> p(static_cast<std::size_t>(q));

  if (total <= static_cast<double>(sampling.max_points)) {
    std::vector<int> idx(static_cast<std::size_t>(q) + 1, 0);
    const auto count = static_cast<std::size_t>(total);
    for (std::size_t c = 0; c < count; ++c) {
      sample.base = static_cast<double>(idx[0]) / g;
      for (int i = 0; i < q; ++i) {
        sample.offsets[i] = static_cast<double>(idx[i + 1]) / (g - 1);
        p[i] = sample.base + sample.offsets[i];
      }
      visit(p);
      for (std::size_t d = 0; d < idx.size(); ++d) {
        if (++idx[d] < g) break;
        idx[d] = 0;
      }
    }
    return;
  }

  std::mt19937_64 rng(sampling.seed);
  for (std::size_t c = 0; c < sampling.max_points; ++c) {
    sample.base = uniform01(rng);
    for (int i = 0; i < q; ++i) {
      sample.offsets[i] = uniform01(rng);
      p[i] = sample.base + sample.offsets[i];
    }
    visit(p);
  }
}

NormBounds sampled_norms(const ModelSpec& model, const SlabSampling& sampling) {
  const int n = model.n;
  const int q = n + 1;
  constexpr double h1 = 1e-4;
  constexpr double h2 = 1e-3;
  NormBounds b;
  std::vector<double> w(static_cast<std::size_t>(q));
  auto eval = [&](std::span<const double> v) { return model.eval_f(v.first(n), v[n]); };

  for_each_slab_point(q, sampling, [&](std::span<const double> p) {
    std::copy(p.begin(), p.end(), w.begin());
    const double f0 = eval(w);
    b.f = std::max(b.f, std::abs(f0));
    for (int j = 0; j < q; ++j) {
      const double wj = w[j];
      w[j] = wj + h1;
      const double fp = eval(w);
      w[j] = wj - h1;
      const double fm = eval(w);
      w[j] = wj + h2;
      const double fpp = eval(w);
      w[j] = wj - h2;
      const double fmm = eval(w);
      w[j] = wj;
      b.df = std::max(b.df, std::abs((fp - fm) / (2 * h1)));
      b.d2f = std::max(b.d2f, std::abs((fpp - 2 * f0 + fmm) / (h2 * h2)));
      for (int k = j + 1; k < q; ++k) {
        const double wk = w[k];
        double mixed = 0.0;
        for (int sj : {1, -1}) {
          for (int sk : {1, -1}) {
            w[j] = wj + sj * h2;
            w[k] = wk + sk * h2;
            mixed += sj * sk * eval(w);
          }
        }
        w[j] = wj;
        w[k] = wk;
        b.d2f = std::max(b.d2f, std::abs(mixed / (4 * h2 * h2)));
      }
    }
  });
  return b;
}

NormBounds norm_bounds(const ModelSpec& model, const SlabSampling& sampling) {
  if (model.norm_bounds) return *model.norm_bounds;
  if (!model.period_normalized) {
    throw std::invalid_argument(
        "norm bounds need a period-normalized model or analytic bounds; the slab supremum of a "
        "non-periodic field may be infinite");
  }
  NormBounds b = sampled_norms(model, sampling);
  constexpr double safety = 1.05;
  return NormBounds{b.f * safety, b.df * safety, b.d2f * safety};
}

double periodicity_defect(const ModelSpec& model, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double T = model.period;
  std::vector<double> y(static_cast<std::size_t>(model.n));
  std::vector<double> ys(y.size());
  double worst = 0.0;
  for (int c = 0; c < samples; ++c) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = uniform(rng, -2.0 * T, 2.0 * T);
      ys[i] = y[i] + T;
    }
    const double z = uniform(rng, -2.0 * T, 2.0 * T);
    const double a = model.eval_f(y, z);
    const double b = model.eval_f(ys, z + T);
    if (!std::isfinite(a) || !std::isfinite(b)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

PerturbationSpec PerturbationSpec::zero(int n) {
  if (n < 1) throw std::invalid_argument("perturbation size must be positive");
  PerturbationSpec p;
  p.kind_ = PerturbationKind::zero;
  p.n_ = n;
  return p;
}

PerturbationSpec PerturbationSpec::constant_detune(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("detune vector is empty");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  for (double& v : values) v -= mean;
  PerturbationSpec p;
  p.kind_ = PerturbationKind::detune;
  p.n_ = static_cast<int>(values.size());
  p.detune_ = std::move(values);
  return p;
}

PerturbationSpec PerturbationSpec::trigonometric(double amplitude, double mode,
                                                 std::vector<double> phases) {
  if (phases.empty()) throw std::invalid_argument("phase vector is empty");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("amplitude must be nonnegative");
  PerturbationSpec p;
  p.kind_ = PerturbationKind::trig;
  p.n_ = static_cast<int>(phases.size());
  p.amplitude_ = amplitude;
  p.mode_ = mode;
  p.phases_ = std::move(phases);
  for (double phi : p.phases_) {
    p.cos_phase_.push_back(std::cos(phi));
    p.sin_phase_.push_back(std::sin(phi));
  }
  return p;
}

PerturbationSpec PerturbationSpec::random_trigonometric(int n, double amplitude, double mode,
                                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> phases(static_cast<std::size_t>(n));
  for (double& phi : phases) phi = kTwoPi * uniform01(rng);
  return trigonometric(amplitude, mode, std::move(phases));
}

PerturbationSpec PerturbationSpec::random_detune(int n, double amplitude, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random detune needs n >= 2");
  std::mt19937_64 rng(seed);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (double& v : w) v = uniform(rng, -1.0, 1.0);
  PerturbationSpec p = constant_detune(std::move(w));
  double peak = 0.0;
  for (double v : p.detune_) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : p.detune_) v *= amplitude / peak;
  }
  return p;
}

void PerturbationSpec::eval_h(std::span<const double> y, std::span<double> out) const {
  switch (kind_) {
    case PerturbationKind::zero:
      std::fill(out.begin(), out.begin() + n_, 0.0);
      return;
    case PerturbationKind::detune:
      std::copy(detune_.begin(), detune_.end(), out.begin());
      return;
    case PerturbationKind::trig: {
      const double mean = std::accumulate(y.begin(), y.begin() + n_, 0.0) / n_;
      const double arg = kTwoPi * mode_ * mean;
      const double s = std::sin(arg);
      const double c = std::cos(arg);
      for (int i = 0; i < n_; ++i) {
        out[i] = amplitude_ * (s * cos_phase_[i] + c * sin_phase_[i]);
      }
      return;
    }
  }
}

std::vector<double> PerturbationSpec::eval_h(std::span<const double> y) const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  eval_h(y, out);
  return out;
}

bool PerturbationSpec::periodic() const {
  if (kind_ != PerturbationKind::trig) return true;
  return std::abs(mode_ - std::round(mode_)) < 1e-12;
}

std::string PerturbationSpec::kind_name() const {
  switch (kind_) {
    case PerturbationKind::zero: return "zero";
    case PerturbationKind::detune: return "detune";
    case PerturbationKind::trig: return "trig";
  }
  return "unknown";
}

double norm_h(const PerturbationSpec& perturbation) {
  switch (perturbation.kind()) {
    case PerturbationKind::zero:
      return 0.0;
    case PerturbationKind::detune: {
      double peak = 0.0;
      for (double v : perturbation.detune()) peak = std::max(peak, std::abs(v));
      return peak;
    }
    case PerturbationKind::trig:
      break;
  }
  // mean(Y) sweeps all of R inside B, so the sine reaches +-1 unless m = 0
  if (perturbation.mode() != 0.0) return std::abs(perturbation.amplitude());
  double peak = 0.0;
  for (double phi : perturbation.phases()) peak = std::max(peak, std::abs(std::sin(phi)));
  return std::abs(perturbation.amplitude()) * peak;
}

}  // namespace mfsync
