#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include <boost/math/tools/minima.hpp>

namespace mfsync {

/// Uniform double in [0, 1) built from the top 53 bits, so sequences are
/// identical across standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Cubic Hermite interpolation on [0, 1] in the local coordinate u with
/// endpoint values p0, p1 and endpoint slopes (already scaled by the interval
/// width) m0, m1.
inline double hermite(double p0, double m0, double p1, double m1, double u) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 +
         (u3 - u2) * m1;
}

/// Derivative of `hermite` with respect to u.
inline double hermite_slope(double p0, double m0, double p1, double m1, double u) {
  const double u2 = u * u;
  return (6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * p1 +
         (3 * u2 - 2 * u) * m1;
}

/// Minimizes a smooth one-dimensional function on [a, b]; returns (argmin, min).
template <class F>
std::pair<double, double> minimize_1d(F&& f, double a, double b) {
  std::uintmax_t max_iter = 200;
  return boost::math::tools::brent_find_minima(std::forward<F>(f), a, b,
                                               std::numeric_limits<double>::digits / 2, max_iter);
}

/// Fractional part in [0, 1).
inline double wrap_unit(double s) {
  double w = s - std::floor(s);
  return w >= 1.0 ? 0.0 : w;
}

}  // namespace mfsync
