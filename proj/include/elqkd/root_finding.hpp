#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <utility>

namespace elqkd {

inline constexpr double kDefaultBisectionTolerance = 1e-9;
inline constexpr int kMaxBisectionIterations = 200;

/// f(lo) and f(hi) have the same sign, so the bracket holds no guaranteed root.
class NoSignChange : public std::invalid_argument {
 public:
  NoSignChange(double lo, double hi)
      : std::invalid_argument("no sign change on [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]") {}
};

/// The iteration cap was hit before the bracket shrank below the tolerance.
class RootNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bisection on a bracketing interval.
///
/// Returns the midpoint of the final bracket once its width is at most `tol`,
/// or an endpoint/midpoint where f evaluates to exactly zero. The returned
/// point is therefore within tol/2 of a sign change of f. Deterministic: the
/// sequence of evaluations depends only on (f, lo, hi, tol).
template <std::invocable<double> F>
double find_root_bisect(F&& f, double lo, double hi,
                        double tol = kDefaultBisectionTolerance) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be > 0");
  if (!(std::isfinite(lo) && std::isfinite(hi))) {
    throw std::invalid_argument("bisection bracket must be finite");
  }
  if (lo > hi) std::swap(lo, hi);

  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0.0) == (f_hi > 0.0)) {
    throw NoSignChange(lo, hi);
  }

  const bool lo_positive = f_lo > 0.0;
  for (int i = 0; i < kMaxBisectionIterations; ++i) {
    if (hi - lo <= tol) return 0.5 * (lo + hi);
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == lo_positive) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw RootNotConverged("bisection did not reach tolerance " + std::to_string(tol) +
                         " within " + std::to_string(kMaxBisectionIterations) +
                         " iterations");
}

}  // namespace elqkd
