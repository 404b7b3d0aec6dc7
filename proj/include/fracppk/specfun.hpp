#pragma once

// Mittag-Leffler type series, Wright-function densities of the stable
// subordinator and its inverse, and grid discretizations of the Caputo and
// tempered Caputo derivatives.

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>
#include <span>
#include <type_traits>
#include <vector>

#include "fracppk/detail/series.hpp"
#include "fracppk/errors.hpp"

namespace fracppk {

/// Largest |z| accepted by the Mittag-Leffler and Prabhakar series.
inline constexpr double kSeriesZCap = 50.0;
/// Largest derivative order accepted by ml_derivative.
inline constexpr int kDerivativeCap = 60;

namespace detail {

inline void check_z_cap(double z, const char* what) {
  if (!(std::fabs(z) <= kSeriesZCap)) {
    throw DomainError(std::string(what) + ": |z| exceeds series cap of 50");
  }
}

inline long double alternating_sign(double z, int j) {
  return (z < 0.0 && (j % 2) != 0) ? -1.0L : 1.0L;
}

}  // namespace detail

namespace detail {

using mp50 = boost::multiprecision::cpp_bin_float_50;
using mp100 = boost::multiprecision::cpp_bin_float_100;
using mp250 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<250>>;

template <class Real>
Real lgamma_of(Real x) {
  if constexpr (std::is_same_v<Real, long double>) {
    return log_gamma(x);
  } else {
    return boost::math::lgamma(x);
  }
}

template <class Real>
struct Tag {
  using type = Real;
};

// Runs series(Tag<Real>) in long double; when an alternating sum loses more
// than rel_tol to cancellation, repeats with 50, 100 and 250 digits.
template <class Series>
double with_precision_fallback(Series&& series, bool alternating) {
  try {
    return series(Tag<long double>{});
  } catch (const CancellationLoss&) {
    if (!alternating) throw;
  }
  try {
    return series(Tag<mp50>{});
  } catch (const CancellationLoss&) {
  }
  try {
    return series(Tag<mp100>{});
  } catch (const CancellationLoss&) {
  }
  return series(Tag<mp250>{});
}

}  // namespace detail

/// Two-parameter Mittag-Leffler function M_{a,b}(z) = sum_j z^j / Gamma(a j + b).
inline double mittag_leffler(double a, double b, double z, const SeriesControl& ctl = {}) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("mittag_leffler: a and b must be > 0");
  if (a == 1.0 && b == 1.0) return std::exp(z);
  if (a != 1.0) detail::check_z_cap(z, "mittag_leffler");
  if (z == 0.0) return 1.0 / std::tgamma(b);
  auto series = [&](auto tag) {
    using Real = typename decltype(tag)::type;
    using std::log;
    const Real log_abs_z = log(Real(std::fabs(z)));
    return detail::sum_series<Real>(
        [&](int j) {
          return detail::BasicSeriesTerm<Real>{Real(j) * log_abs_z - detail::lgamma_of(Real(a) * j + Real(b)),
                                               Real(detail::alternating_sign(z, j))};
        },
        0, ctl, "mittag_leffler");
  };
  return detail::with_precision_fallback(series, z < 0.0);
}

/// Prabhakar (three-parameter) Mittag-Leffler function
/// sum_j (c)_j z^j / (Gamma(a j + b) j!).
inline double prabhakar_ml(double a, double b, double c, double z, const SeriesControl& ctl = {}) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("prabhakar_ml: a and b must be > 0");
  if (!(c >= 0.0)) throw DomainError("prabhakar_ml: c must be >= 0");
  if (a != 1.0) detail::check_z_cap(z, "prabhakar_ml");
  if (c == 0.0 || z == 0.0) return 1.0 / std::tgamma(b);
  auto series = [&](auto tag) {
    using Real = typename decltype(tag)::type;
    using std::log;
    const Real log_abs_z = log(Real(std::fabs(z)));
    const Real lg_c = detail::lgamma_of(Real(c));
    return detail::sum_series<Real>(
        [&](int j) {
          const Real rj = j;
          return detail::BasicSeriesTerm<Real>{detail::lgamma_of(Real(c) + rj) - lg_c - detail::lgamma_of(rj + 1) -
                                                   detail::lgamma_of(Real(a) * rj + Real(b)) + rj * log_abs_z,
                                               Real(detail::alternating_sign(z, j))};
        },
        0, ctl, "prabhakar_ml");
  };
  return detail::with_precision_fallback(series, z < 0.0);
}

namespace detail {

// Term-wise differentiated Mittag-Leffler series summed in Real arithmetic.
template <class Real>
double ml_derivative_series(int n, double beta, double z, const SeriesControl& ctl) {
  using std::log;
  const Real log_abs_z = log(Real(std::fabs(z)));
  const Real b = beta;
  // log((n+m)!/m!) advanced incrementally; sum_series visits m = 0, 1, 2, ...
  Real log_ratio = lgamma_of(Real(n + 1));
  int last_m = 0;
  return sum_series<Real>(
      [&](int m) {
        for (; last_m < m; ++last_m) log_ratio += log(Real(n + last_m + 1)) - log(Real(last_m + 1));
        const Real k = n + m;
        const Real sgn = alternating_sign(z, m);
        return BasicSeriesTerm<Real>{log_ratio - lgamma_of(Real(b * k + 1)) + Real(m) * log_abs_z, sgn};
      },
      0, ctl, "ml_derivative");
}

}  // namespace detail

/// n-th derivative of M_{beta,1} at z, from the term-wise differentiated series
/// sum_m (n+m)! / (m! Gamma(beta (n+m) + 1)) z^m. For beta = 1 this is e^z.
///
/// For z < 0 the series alternates; when the long-double sum loses more than
/// rel_tol to cancellation the same series is re-summed with 50, 100 and then
/// 250 significant digits before giving up.
inline double ml_derivative(int n, double beta, double z, const SeriesControl& ctl = {}) {
  if (n < 0) throw DomainError("ml_derivative: n must be >= 0");
  if (n > kDerivativeCap) throw DomainError("ml_derivative: n exceeds derivative cap of 60");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("ml_derivative: beta must lie in (0,1]");
  if (beta == 1.0) return std::exp(z);
  detail::check_z_cap(z, "ml_derivative");
  if (z == 0.0) return std::tgamma(n + 1.0) / std::tgamma(beta * n + 1.0);
  auto series = [&](auto tag) {
    using Real = typename decltype(tag)::type;
    return detail::ml_derivative_series<Real>(n, beta, z, ctl);
  };
  return detail::with_precision_fallback(series, z < 0.0);
}

/// Wright function W_{-beta,0}(-y) for y > 0:
/// sum_{k>=1} (-1)^{k+1} y^k Gamma(beta k + 1) sin(pi beta k) / (pi k!).
/// Cancellation is handled as in ml_derivative; NonConvergence means even 250
/// digits were not enough.
inline double wright_neg(double beta, double y, const SeriesControl& ctl = {}) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("wright_neg: beta must lie in (0,1)");
  if (!(y > 0.0)) throw DomainError("wright_neg: y must be > 0");
  auto series = [&](auto tag) {
    using Real = typename decltype(tag)::type;
    using std::log;
    const Real log_y = log(Real(y));
    const Real log_pi = log(boost::math::constants::pi<Real>());
    return detail::sum_series<Real>(
        [&](int k) {
          const Real rk = k;
          const Real sgn = (k % 2 == 1) ? 1 : -1;
          return detail::BasicSeriesTerm<Real>{
              detail::lgamma_of(Real(beta) * rk + 1) - detail::lgamma_of(rk + 1) + rk * log_y - log_pi,
              Real(sgn * boost::math::sin_pi(Real(beta) * rk))};
        },
        1, ctl, "wright_neg");
  };
  return detail::with_precision_fallback(series, true);
}

/// Density f_beta(x, t) of the stable subordinator S_beta(t) with
/// E exp(-s S(t)) = exp(-t s^beta). Raises NonConvergence for small x / large t,
/// where the alternating series cancels beyond the tolerance.
inline double stable_density(double beta, double x, double t, const SeriesControl& ctl = {}) {
  if (!(x > 0.0) || !(t > 0.0)) throw DomainError("stable_density: x and t must be > 0");
  return std::fmax(0.0, wright_neg(beta, t * std::pow(x, -beta), ctl) / x);
}

/// Density h_beta(x, t) of the inverse stable subordinator E_beta(t).
inline double inv_stable_density(double beta, double x, double t, const SeriesControl& ctl = {}) {
  if (!(x > 0.0) || !(t > 0.0)) throw DomainError("inv_stable_density: x and t must be > 0");
  return std::fmax(0.0, wright_neg(beta, x * std::pow(t, -beta), ctl) / (beta * x));
}

/// Samples of a function on a uniform time grid.
struct GridFunction {
  std::vector<double> times;
  std::vector<double> values;

  static GridFunction uniform(double step, std::vector<double> values) {
    GridFunction g;
    g.times.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) g.times[i] = step * static_cast<double>(i);
    g.values = std::move(values);
    return g;
  }

  void validate() const {
    if (times.size() != values.size()) throw DomainError("GridFunction: length mismatch");
    if (times.size() < 3) throw GridTooCoarse("GridFunction: need at least 3 points");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) throw DomainError("GridFunction: times must increase strictly");
    }
  }

  double step() const { return times[1] - times[0]; }

  void require_uniform() const {
    const double h = step();
    for (std::size_t i = 2; i < times.size(); ++i) {
      if (std::fabs((times[i] - times[i - 1]) - h) > 1e-9 * std::fmax(1.0, std::fabs(times[i]))) {
        throw DomainError("GridFunction: grid must be uniform");
      }
    }
  }
};

namespace detail {

inline void check_caputo_args(const GridFunction& g, std::size_t at_index) {
  g.validate();
  g.require_uniform();
  if (at_index < 2) throw GridTooCoarse("caputo: at_index must be >= 2");
  if (at_index >= g.times.size()) throw DomainError("caputo: at_index out of range");
}

// Convolves cell increments with precomputed per-offset weights:
// sum_{j=1}^{n} (g_j - g_{j-1}) w[n - j].
inline double convolve_increments(std::span<const double> values, std::size_t n,
                                  std::span<const double> w) {
  double acc = 0.0;
  for (std::size_t j = 1; j <= n; ++j) acc += (values[j] - values[j - 1]) * w[n - j];
  return acc;
}

inline std::vector<double> l1_weights(double beta, double h, std::size_t count) {
  std::vector<double> w(count);
  const double c = std::pow(h, -beta) / std::tgamma(2.0 - beta);
  for (std::size_t j = 0; j < count; ++j) {
    const double a = static_cast<double>(j);
    w[j] = c * (std::pow(a + 1.0, 1.0 - beta) - (j == 0 ? 0.0 : std::pow(a, 1.0 - beta)));
  }
  return w;
}

}  // namespace detail

/// Caputo derivative of order beta in (0,1] at grid index `at_index`, by the
/// L1 scheme (piecewise-linear interpolation of g). Error O(h^{2-beta}) for
/// smooth g; for beta = 1 this is the backward difference quotient.
inline double caputo_derivative(const GridFunction& g, double beta, std::size_t at_index) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("caputo_derivative: beta must lie in (0,1]");
  detail::check_caputo_args(g, at_index);
  const auto w = detail::l1_weights(beta, g.step(), at_index);
  return detail::convolve_increments(g.values, at_index, w);
}

/// Caputo derivative at every grid index >= 2 (entries 0 and 1 are NaN).
inline std::vector<double> caputo_derivative_all(const GridFunction& g, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("caputo_derivative: beta must lie in (0,1]");
  detail::check_caputo_args(g, 2);
  const std::size_t n = g.values.size();
  const auto w = detail::l1_weights(beta, g.step(), n);
  std::vector<double> out(n, std::nan(""));
  for (std::size_t i = 2; i < n; ++i) out[i] = detail::convolve_increments(g.values, i, w);
  return out;
}

/// Tail of the tempered stable Levy measure scaled by 1/Gamma(1-beta):
/// (1/Gamma(1-beta)) * int_t^inf e^{-nu r} beta r^{-beta-1} dr.
inline double tempered_tail(double beta, double nu, double t) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("tempered_tail: beta must lie in (0,1)");
  if (!(nu >= 0.0) || !(t > 0.0)) throw DomainError("tempered_tail: need nu >= 0, t > 0");
  const double g1 = std::tgamma(1.0 - beta);
  if (nu == 0.0) return std::pow(t, -beta) / g1;
  // Gamma(-beta, y) = (y^{-beta} e^{-y} - Gamma(1-beta, y)) / beta
  const double y = nu * t;
  return (std::pow(t, -beta) * std::exp(-y) -
          std::pow(nu, beta) * boost::math::tgamma(1.0 - beta, y)) / g1;
}

namespace detail {

// Psi(x) = int_0^x tempered_tail(r) dr.
inline double tempered_tail_integral(double beta, double nu, double x) {
  if (x <= 0.0) return 0.0;
  if (nu == 0.0) return std::pow(x, 1.0 - beta) / std::tgamma(2.0 - beta);
  return x * tempered_tail(beta, nu, x) +
         beta / std::tgamma(1.0 - beta) * std::pow(nu, beta - 1.0) *
             boost::math::tgamma_lower(1.0 - beta, nu * x);
}

inline std::vector<double> tempered_weights(double beta, double nu, double h, std::size_t count) {
  std::vector<double> w(count);
  double prev = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double next = tempered_tail_integral(beta, nu, h * static_cast<double>(j + 1));
    w[j] = (next - prev) / h;
    prev = next;
  }
  return w;
}

}  // namespace detail

/// Caputo tempered fractional derivative of order beta in (0,1), tempering nu >= 0.
///
/// Uses the kernel-tail form d/dt int_0^t g(u) K(t-u) du - K(t) g(0), with K the
/// tempered tail above; after integrating by parts this equals
/// int_0^t g'(u) K(t-u) du, which is discretized with piecewise-linear g
/// (exact cell integrals of K). Reduces to the L1 Caputo scheme when nu = 0.
inline double tempered_caputo_derivative(const GridFunction& g, double beta, double nu,
                                         std::size_t at_index) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("tempered_caputo_derivative: beta must lie in (0,1)");
  if (!(nu >= 0.0)) throw DomainError("tempered_caputo_derivative: nu must be >= 0");
  detail::check_caputo_args(g, at_index);
  const auto w = detail::tempered_weights(beta, nu, g.step(), at_index);
  return detail::convolve_increments(g.values, at_index, w);
}

inline std::vector<double> tempered_caputo_derivative_all(const GridFunction& g, double beta, double nu) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("tempered_caputo_derivative: beta must lie in (0,1)");
  if (!(nu >= 0.0)) throw DomainError("tempered_caputo_derivative: nu must be >= 0");
  detail::check_caputo_args(g, 2);
  const std::size_t n = g.values.size();
  const auto w = detail::tempered_weights(beta, nu, g.step(), n);
  std::vector<double> out(n, std::nan(""));
  for (std::size_t i = 2; i < n; ++i) out[i] = detail::convolve_increments(g.values, i, w);
  return out;
}

}  // namespace fracppk
