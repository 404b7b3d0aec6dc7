#pragma once

#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

#include "fracppk/errors.hpp"

namespace fracppk {

/// Stopping rule shared by every power-series evaluation in the library.
struct SeriesControl {
  double rel_tol = 1e-12;
  int max_terms = 2000;

  void validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("SeriesControl: rel_tol must be > 0");
    if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
  }
};

namespace detail {

/// NonConvergence caused by cancellation; retrying with more digits can help.
class CancellationLoss : public NonConvergence {
 public:
  using NonConvergence::NonConvergence;
};

/// log Gamma for positive arguments; reentrant (no write to signgam).
inline long double log_gamma(long double x) {
  int sign = 0;
  return ::lgammal_r(x, &sign);
}

inline double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

/// One term of a series written as exp(log_envelope) * scale with |scale| <= 1.
/// The envelope drives the stopping rule so that terms which vanish through
/// the scale factor (e.g. sin(pi*k*beta) == 0) do not stop summation early.
template <class Real>
struct BasicSeriesTerm {
  Real log_envelope;
  Real scale;
};
using SeriesTerm = BasicSeriesTerm<long double>;

/// Sums a series whose term ratios eventually decrease monotonically.
///
/// Stops at the first index where the envelope ratio q < 1 and the geometric
/// tail bound e_j * q / (1 - q) falls below rel_tol * |sum|. Accumulates in
/// Real and raises NonConvergence if the largest term times the epsilon of
/// Real exceeds rel_tol * |sum| (digits lost to cancellation).
template <class Real = long double, class TermFn>
double sum_series(TermFn&& term, int first, const SeriesControl& ctl, const char* what) {
  using std::exp;
  using std::fabs;
  using std::isfinite;
  ctl.validate();
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tol = ctl.rel_tol;
  Real sum = 0;
  Real max_abs = 0;
  Real prev_log = 0;
  bool have_prev = false;
  for (int i = 0; i < ctl.max_terms; ++i) {
    const int j = first + i;
    const BasicSeriesTerm<Real> t = term(j);
    const Real env = exp(t.log_envelope);
    const Real value = env * t.scale;
    sum += value;
    if (fabs(value) > max_abs) max_abs = fabs(value);
    if (!isfinite(static_cast<double>(sum))) {
      throw NonConvergence(std::string(what) + ": overflow while summing series");
    }
    if (have_prev) {
      const Real q = exp(t.log_envelope - prev_log);
      const Real scale = fabs(sum) > Real(LDBL_MIN) ? Real(fabs(sum)) : Real(LDBL_MIN);
      if (q < 1 && env * q / (1 - q) <= tol * scale) {
        if (max_abs * eps > tol * fabs(sum)) {
          throw CancellationLoss(std::string(what) +
                                 ": cancellation exceeds tolerance (argument outside series regime)");
        }
        return static_cast<double>(sum);
      }
    }
    prev_log = t.log_envelope;
    have_prev = true;
  }
  throw NonConvergence(std::string(what) + ": max_terms reached before tail bound");
}

}  // namespace detail
}  // namespace fracppk
