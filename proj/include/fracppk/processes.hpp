#pragma once

// Poisson process of order k (PPoK) and its time-fractional (TF),
// space-fractional (SF) and tempered time-space fractional (TTSF) versions:
// pmfs, pgfs, moments, jump weights, first-passage densities and samplers.

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fracppk/combinatorics.hpp"
#include "fracppk/errors.hpp"
#include "fracppk/rng.hpp"
#include "fracppk/specfun.hpp"
#include "fracppk/subordinators.hpp"

namespace fracppk {

/// Space index alpha, time index beta, space tempering mu, time tempering nu.
/// alpha = 1 disables the space clock and beta = 1 the time clock.
struct FracParams {
  double alpha = 1.0;
  double beta = 1.0;
  double mu = 0.0;
  double nu = 0.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("FracParams: alpha must lie in (0,1]");
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("FracParams: beta must lie in (0,1]");
    if (!(mu >= 0.0) || !(nu >= 0.0)) throw DomainError("FracParams: mu and nu must be >= 0");
  }
};

enum class Variant { PPoK, TF, SF, TTSF, Field };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::PPoK: return "ppok";
    case Variant::TF: return "tfppok";
    case Variant::SF: return "sfppok";
    case Variant::TTSF: return "ttsfppok";
    case Variant::Field: return "field";
  }
  return "unknown";
}

/// probs[n] = P(N = n) for n = 0..n_max; truncation_mass = 1 - sum(probs).
struct PmfTable {
  Variant variant = Variant::PPoK;
  OrderParams order;
  FracParams frac;
  double t = 1.0;
  std::vector<double> probs;
  double truncation_mass = 0.0;
};

/// Jump times and marks of one PPoK path on [0, horizon]; counts[i] = N^k(event_times[i]).
struct MarkedEventPath {
  double horizon = 0.0;
  std::vector<double> event_times;
  std::vector<int> marks;
  std::vector<std::int64_t> counts;
};

namespace detail {

inline void check_t(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(what) + ": t must be > 0");
}

inline void check_n(int n, const char* what) {
  if (n < 0) throw DomainError(std::string(what) + ": n must be >= 0");
  if (n > kNCap) throw CapExceeded(std::string(what) + ": n exceeds cap of " + std::to_string(kNCap));
}

inline void check_u(double u, const char* what) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError(std::string(what) + ": u must lie in [0,1]");
}

inline PmfTable finish_table(PmfTable table) {
  double total = 0.0;
  for (double p : table.probs) total += p;
  table.truncation_mass = 1.0 - total;
  return table;
}

}  // namespace detail

/// pgf of the uniform jump law on {1..k}: (1/k) sum_{j=1}^k u^j.
inline double jump_pgf(int k, double u) {
  if (u == 1.0) return 1.0;
  double acc = 0.0, power = 1.0;
  for (int j = 1; j <= k; ++j) {
    power *= u;
    acc += power;
  }
  return acc / k;
}

// ---------------------------------------------------------------- PPoK

inline double ppok_pmf(const OrderParams& p, double t, int n) {
  p.validate();
  detail::check_t(t, "ppok_pmf");
  detail::check_n(n, "ppok_pmf");
  return order_k_poisson_pmf(p.k, n, p.lambda * t);
}

inline double ppok_pgf(const OrderParams& p, double t, double u) {
  p.validate();
  detail::check_t(t, "ppok_pgf");
  detail::check_u(u, "ppok_pgf");
  return std::exp(-p.k * p.lambda * t * (1.0 - jump_pgf(p.k, u)));
}

inline PmfTable ppok_pmf_table(const OrderParams& p, double t, int n_max) {
  detail::check_n(n_max, "ppok_pmf_table");
  PmfTable table{Variant::PPoK, p, FracParams{}, t, {}, 0.0};
  for (int n = 0; n <= n_max; ++n) table.probs.push_back(ppok_pmf(p, t, n));
  return detail::finish_table(std::move(table));
}

// ---------------------------------------------------------------- TFPPoK

namespace detail {

// sum_zeta c_zeta M^{(zeta)}(z) w^zeta, with the derivative values supplied by `deriv`.
template <class Deriv>
double tf_combine(int k, int n, double w, Deriv&& deriv) {
  const auto c = zeta_weights(k, n);
  long double acc = 0.0L;
  for (int zeta = 0; zeta <= n; ++zeta) {
    if (c[static_cast<std::size_t>(zeta)] == 0.0) continue;
    acc += static_cast<long double>(c[static_cast<std::size_t>(zeta)]) * deriv(zeta) * std::pow(static_cast<long double>(w), zeta);
  }
  return static_cast<double>(acc);
}

}  // namespace detail

/// P(N^k_beta(t) = n) = sum_{X in Omega(k,n)} M^{(zeta)}_{beta,1}(-k lambda t^beta) (lambda t^beta)^zeta / Pi!.
/// Each composition contributes the zeta-th derivative, E[E^zeta e^{-k lambda E}] = t^{beta zeta} M^{(zeta)}(-k lambda t^beta).
inline double tfppok_pmf(const OrderParams& p, double beta, double t, int n, const SeriesControl& ctl = {}) {
  p.validate();
  detail::check_t(t, "tfppok_pmf");
  detail::check_n(n, "tfppok_pmf");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("tfppok_pmf: beta must lie in (0,1]");
  if (beta == 1.0) return ppok_pmf(p, t, n);
  const double w = p.lambda * std::pow(t, beta);
  const double z = -p.k * w;
  return detail::tf_combine(p.k, n, w, [&](int zeta) { return ml_derivative(zeta, beta, z, ctl); });
}

inline PmfTable tfppok_pmf_table(const OrderParams& p, double beta, double t, int n_max,
                                 const SeriesControl& ctl = {}) {
  p.validate();
  detail::check_t(t, "tfppok_pmf_table");
  detail::check_n(n_max, "tfppok_pmf_table");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("tfppok_pmf_table: beta must lie in (0,1]");
  PmfTable table{Variant::TF, p, FracParams{1.0, beta, 0.0, 0.0}, t, {}, 0.0};
  if (beta == 1.0) {
    for (int n = 0; n <= n_max; ++n) table.probs.push_back(ppok_pmf(p, t, n));
    return detail::finish_table(std::move(table));
  }
  const double w = p.lambda * std::pow(t, beta);
  const double z = -p.k * w;
  std::vector<double> deriv(static_cast<std::size_t>(n_max) + 1);
  for (int j = 0; j <= n_max; ++j) deriv[static_cast<std::size_t>(j)] = ml_derivative(j, beta, z, ctl);
  for (int n = 0; n <= n_max; ++n) {
    table.probs.push_back(detail::tf_combine(p.k, n, w, [&](int zeta) { return deriv[static_cast<std::size_t>(zeta)]; }));
  }
  return detail::finish_table(std::move(table));
}

inline double tfppok_pgf(const OrderParams& p, double beta, double t, double u, const SeriesControl& ctl = {}) {
  p.validate();
  detail::check_t(t, "tfppok_pgf");
  detail::check_u(u, "tfppok_pgf");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("tfppok_pgf: beta must lie in (0,1]");
  if (u == 1.0) return 1.0;
  return mittag_leffler(beta, 1.0, -p.k * p.lambda * std::pow(t, beta) * (1.0 - jump_pgf(p.k, u)), ctl);
}

struct TfMoments {
  double mean_t = 0.0;
  double covariance = 0.0;
};

/// E[E_beta(s) E_beta(t)] for s <= t.
inline double inverse_stable_cross_moment(double beta, double s, double t) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("inverse_stable_cross_moment: beta must lie in (0,1]");
  if (!(s > 0.0) || !(t >= s)) throw DomainError("inverse_stable_cross_moment: need 0 < s <= t");
  if (beta == 1.0) return s * t;
  const double g = std::tgamma(1.0 + beta);
  const double full = boost::math::beta(beta, 1.0 + beta);
  const double partial = boost::math::beta(beta, 1.0 + beta, s / t);  // non-regularized incomplete beta
  return (std::pow(s, 2.0 * beta) * full + std::pow(t, 2.0 * beta) * partial) * beta / (g * g);
}

/// Mean at t and covariance at (s, t) of N^k(E_beta(.)), for 0 < s <= t.
inline TfMoments tfppok_moments(const OrderParams& p, double beta, double s, double t) {
  p.validate();
  detail::check_t(s, "tfppok_moments");
  if (!(t >= s)) throw DomainError("tfppok_moments: need s <= t");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("tfppok_moments: beta must lie in (0,1]");
  const double k = p.k, lam = p.lambda;
  const double g = std::tgamma(1.0 + beta);
  const double mean_s_clock = std::pow(s, beta) / g;
  const double mean_t_clock = std::pow(t, beta) / g;
  const double clock_cov = inverse_stable_cross_moment(beta, s, t) - mean_s_clock * mean_t_clock;
  TfMoments m;
  m.mean_t = lam * k * (k + 1.0) / 2.0 * mean_t_clock;
  m.covariance = lam * k * (k + 1.0) * (2.0 * k + 1.0) / 6.0 * mean_s_clock +
                 k * k * (k + 1.0) * (k + 1.0) * lam * lam / 4.0 * clock_cov;
  return m;
}

// ---------------------------------------------------------------- SFPPoK

namespace detail {

// sum_{r>=0} (-z)^r / r! [alpha r]_zeta, summed in Real.
template <class Real>
double sf_inner_series(double alpha, int zeta, double z, const SeriesControl& ctl) {
  using std::log;
  using std::pow;
  using boost::math::lgamma;
  const Real log_z = log(Real(z));
  const Real a = alpha;
  return sum_series<Real>(
      [&](int r) {
        const Real ar = a * r;
        Real ff = 1;
        for (int i = 0; i < zeta; ++i) ff *= (ar - i);
        const Real bound = zeta == 0 ? Real(1) : Real(pow(ar + zeta, zeta));
        const Real sign = (r % 2 == 0) ? Real(1) : Real(-1);
        return BasicSeriesTerm<Real>{Real(r) * log_z - lgamma(Real(r + 1)) + log(bound), sign * ff / bound};
      },
      0, ctl, "sfppok_pmf");
}

inline double sf_inner(double alpha, int zeta, double z, const SeriesControl& ctl) {
  try {
    return sf_inner_series<long double>(alpha, zeta, z, ctl);
  } catch (const NonConvergence&) {
  }
  try {
    return sf_inner_series<mp50>(alpha, zeta, z, ctl);
  } catch (const NonConvergence&) {
  }
  return sf_inner_series<mp100>(alpha, zeta, z, ctl);
}

inline double sf_combine(int k, int n, const std::vector<double>& inner) {
  const auto c = zeta_weights(k, n);
  long double acc = 0.0L;
  for (int zeta = 0; zeta <= n; ++zeta) {
    const long double sign = zeta % 2 == 0 ? 1.0L : -1.0L;
    acc += sign * c[static_cast<std::size_t>(zeta)] * std::pow(static_cast<long double>(k), -zeta) *
           inner[static_cast<std::size_t>(zeta)];
  }
  return static_cast<double>(acc);
}

}  // namespace detail

/// P(R^k_alpha(t) = n) = sum_{X in Omega(k,n)} (-1)^zeta / (Pi! k^zeta)
///                       * sum_{r>=0} (-z)^r / r! [alpha r]_zeta,    z = (k lambda)^alpha t,
/// where [x]_j = x (x-1) ... (x-j+1) is the falling factorial.
inline double sfppok_pmf(const OrderParams& p, double alpha, double t, int n, const SeriesControl& ctl = {}) {
  p.validate();
  detail::check_t(t, "sfppok_pmf");
  detail::check_n(n, "sfppok_pmf");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("sfppok_pmf: alpha must lie in (0,1]");
  const double z = std::pow(p.k * p.lambda, alpha) * t;
  detail::check_z_cap(z, "sfppok_pmf");
  if (alpha == 1.0) return ppok_pmf(p, t, n);
  std::vector<double> inner(static_cast<std::size_t>(n) + 1);
  for (int zeta = 0; zeta <= n; ++zeta) inner[static_cast<std::size_t>(zeta)] = detail::sf_inner(alpha, zeta, z, ctl);
  return detail::sf_combine(p.k, n, inner);
}

inline PmfTable sfppok_pmf_table(const OrderParams& p, double alpha, double t, int n_max,
                                 const SeriesControl& ctl = {}) {
  p.validate();
  detail::check_t(t, "sfppok_pmf_table");
  detail::check_n(n_max, "sfppok_pmf_table");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("sfppok_pmf_table: alpha must lie in (0,1]");
  PmfTable table{Variant::SF, p, FracParams{alpha, 1.0, 0.0, 0.0}, t, {}, 0.0};
  if (alpha == 1.0) {
    for (int n = 0; n <= n_max; ++n) table.probs.push_back(ppok_pmf(p, t, n));
    return detail::finish_table(std::move(table));
  }
  const double z = std::pow(p.k * p.lambda, alpha) * t;
  detail::check_z_cap(z, "sfppok_pmf_table");
  std::vector<double> inner(static_cast<std::size_t>(n_max) + 1);
  for (int zeta = 0; zeta <= n_max; ++zeta) inner[static_cast<std::size_t>(zeta)] = detail::sf_inner(alpha, zeta, z, ctl);
  for (int n = 0; n <= n_max; ++n) table.probs.push_back(std::fmax(0.0, detail::sf_combine(p.k, n, inner)));
  return detail::finish_table(std::move(table));
}

inline double sfppok_pgf(const OrderParams& p, double alpha, double t, double u) {
  p.validate();
  detail::check_t(t, "sfppok_pgf");
  detail::check_u(u, "sfppok_pgf");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("sfppok_pgf: alpha must lie in (0,1]");
  if (u == 1.0) return 1.0;
  return std::exp(-std::pow(p.k * p.lambda, alpha) * t * std::pow(1.0 - jump_pgf(p.k, u), alpha));
}

/// Largest y_max accepted by sfppok_levy_weights.
inline constexpr int kLevyYCap = 5000;

/// Jump-size weights nu_y, y = 1..y_max (index 0 holds y = 0 and is 0):
///   nu_y = (k lambda)^alpha sum_{X in Omega(k,y)} (-1)^{zeta+1} [alpha]_zeta / (Pi! k^zeta)
///        = (k lambda)^alpha sum_zeta (-1)^{zeta+1} binom(alpha, zeta) P(J_1 + ... + J_zeta = y),
/// with J_i iid uniform on {1..k}. The convolution form avoids enumerating Omega,
/// so y_max is not bound by the pmf cap.
inline std::vector<double> sfppok_levy_weights(const OrderParams& p, double alpha, int y_max) {
  p.validate();
  if (y_max < 1) throw DomainError("sfppok_levy_weights: y_max must be >= 1");
  if (y_max > kLevyYCap) throw CapExceeded("sfppok_levy_weights: y_max exceeds cap of " + std::to_string(kLevyYCap));
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("sfppok_levy_weights: alpha must lie in (0,1]");
  const auto Y = static_cast<std::size_t>(y_max);
  const long double scale = std::pow(static_cast<long double>(p.k) * p.lambda, static_cast<long double>(alpha));
  std::vector<long double> acc(Y + 1, 0.0L);
  // dist[y] = P(J_1 + ... + J_zeta = y), truncated at Y.
  std::vector<long double> dist(Y + 1, 0.0L), next(Y + 1);
  dist[0] = 1.0L;
  long double binom = 1.0L;  // binom(alpha, zeta)
  for (int zeta = 1; zeta <= y_max; ++zeta) {
    binom *= (static_cast<long double>(alpha) - (zeta - 1)) / zeta;
    std::fill(next.begin(), next.end(), 0.0L);
    // Sliding window sum over the k predecessors.
    long double window = 0.0L;
    for (std::size_t y = 0; y <= Y; ++y) {
      if (y >= 1) window += dist[y - 1];
      if (y >= static_cast<std::size_t>(p.k) + 1) window -= dist[y - 1 - static_cast<std::size_t>(p.k)];
      next[y] = window / p.k;
    }
    dist.swap(next);
    const long double coef = (zeta % 2 == 0 ? -1.0L : 1.0L) * binom;
    for (std::size_t y = static_cast<std::size_t>(zeta); y <= Y; ++y) acc[y] += coef * dist[y];
  }
  std::vector<double> w(Y + 1, 0.0);
  for (std::size_t y = 1; y <= Y; ++y) w[y] = static_cast<double>(scale * acc[y]);
  return w;
}

/// Characteristic exponent -(k lambda)^alpha (1 - (1/k) sum_j e^{i theta j})^alpha.
inline std::complex<double> sfppok_char_exponent(const OrderParams& p, double alpha, double theta) {
  std::complex<double> g = 0.0;
  for (int j = 1; j <= p.k; ++j) g += std::polar(1.0, theta * j);
  g /= static_cast<double>(p.k);
  return -std::pow(p.k * p.lambda, alpha) * std::pow(1.0 - g, alpha);
}

/// sum_{y=1}^{y_max} nu_y (e^{i theta y} - 1).
inline std::complex<double> levy_reconstruction(const std::vector<double>& weights, double theta) {
  std::complex<long double> acc = 0.0L;
  for (std::size_t y = 1; y < weights.size(); ++y) {
    acc += static_cast<long double>(weights[y]) *
           (std::polar(1.0L, static_cast<long double>(theta) * y) - std::complex<long double>(1.0L));
  }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

namespace detail {

// Coefficients a_{zeta,i} of d^zeta/dlambda^zeta e^{-c lambda^alpha}
//   = e^{-c lambda^alpha} sum_i a_{zeta,i} c^i lambda^{i alpha - zeta}.
inline std::vector<std::vector<long double>> lambda_derivative_coeffs(double alpha, int zeta_max) {
  std::vector<std::vector<long double>> a(static_cast<std::size_t>(zeta_max) + 1);
  a[0] = {1.0L};
  for (int z = 0; z < zeta_max; ++z) {
    const auto& prev = a[static_cast<std::size_t>(z)];
    std::vector<long double> next(prev.size() + 1, 0.0L);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      next[i] += (static_cast<long double>(i) * alpha - z) * prev[i];
      next[i + 1] -= static_cast<long double>(alpha) * prev[i];
    }
    a[static_cast<std::size_t>(z) + 1] = std::move(next);
  }
  return a;
}

// P(R(t) = n) = e^{-x} sum_i b_i x^i with x = kappa t, kappa = (k lambda)^alpha.
inline std::vector<long double> sf_pmf_polynomial(int k, int n,
                                                  const std::vector<std::vector<long double>>& a) {
  const auto c = zeta_weights(k, n);
  std::vector<long double> b(static_cast<std::size_t>(n) + 1, 0.0L);
  for (int zeta = 0; zeta <= n; ++zeta) {
    const long double coef = (zeta % 2 == 0 ? 1.0L : -1.0L) * c[static_cast<std::size_t>(zeta)] *
                             std::pow(static_cast<long double>(k), -zeta);
    const auto& az = a[static_cast<std::size_t>(zeta)];
    for (std::size_t i = 0; i < az.size(); ++i) b[i] += coef * az[i];
  }
  return b;
}

}  // namespace detail

/// P(R(t) = n) from the finite closed form obtained by differentiating
/// e^{-t k^alpha lambda^alpha} in lambda (no infinite series).
inline double sfppok_pmf_closed(const OrderParams& p, double alpha, double t, int n) {
  p.validate();
  detail::check_t(t, "sfppok_pmf_closed");
  detail::check_n(n, "sfppok_pmf_closed");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("sfppok_pmf_closed: alpha must lie in (0,1]");
  const auto a = detail::lambda_derivative_coeffs(alpha, n);
  const auto b = detail::sf_pmf_polynomial(p.k, n, a);
  const long double x = std::pow(static_cast<long double>(p.k) * p.lambda, static_cast<long double>(alpha)) * t;
  long double acc = 0.0L, power = 1.0L;
  for (long double bi : b) {
    acc += bi * power;
    power *= x;
  }
  return static_cast<double>(std::exp(-x) * acc);
}

/// Density at t of T_l = inf{t : R(t) >= l}:
/// f_l = f_{l-1} - d/dt P(R(t) = l-1), f_0 = 0, with each P(R(t) = j) in closed form.
inline double sfppok_first_passage(const OrderParams& p, double alpha, int l, double t) {
  p.validate();
  detail::check_t(t, "sfppok_first_passage");
  if (l < 1) throw DomainError("sfppok_first_passage: l must be >= 1");
  if (l > kNCap) throw CapExceeded("sfppok_first_passage: l exceeds cap of " + std::to_string(kNCap));
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("sfppok_first_passage: alpha must lie in (0,1]");
  const long double kappa = std::pow(static_cast<long double>(p.k) * p.lambda, static_cast<long double>(alpha));
  const long double x = kappa * t;
  const auto a = detail::lambda_derivative_coeffs(alpha, l - 1);
  long double density = 0.0L;
  for (int j = 0; j < l; ++j) {
    // d/dt [e^{-x} sum_i b_i x^i] = kappa e^{-x} sum_i b_i (i x^{i-1} - x^i)
    const auto b = detail::sf_pmf_polynomial(p.k, j, a);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const long double xi = std::pow(x, static_cast<long double>(i));
      const long double xim1 = i == 0 ? 0.0L : std::pow(x, static_cast<long double>(i) - 1.0L);
      acc += b[i] * (static_cast<long double>(i) * xim1 - xi);
    }
    density -= kappa * std::exp(-x) * acc;
  }
  return static_cast<double>(density);
}

// ---------------------------------------------------------------- TTSFPPoK

struct TtsfTruncation {
  int r_max = 400;
  int m_max = 400;
};

/// pgf of N^k(S_{alpha,mu}(E_{beta,nu}(t))):
///   e^{-t nu} sum_r (-B)^r sum_m nu^m t^{beta r + m} M^r_{beta, beta r + m + 1}((t nu)^beta),
///   B = (mu + k lambda (1 - G_X(u)))^alpha - mu^alpha.
/// Convergence is checked numerically: the r-loop stops once five consecutive
/// shells are below 1e-14 of the partial sum, else NonConvergence.
inline double ttsfppok_pgf(const OrderParams& p, const FracParams& f, double t, double u,
                           const TtsfTruncation& trunc = {}, const SeriesControl& ctl = {}) {
  p.validate();
  f.validate();
  detail::check_t(t, "ttsfppok_pgf");
  detail::check_u(u, "ttsfppok_pgf");
  if (trunc.r_max < 1 || trunc.m_max < 1) throw DomainError("ttsfppok_pgf: truncation must be positive");
  const double gx = jump_pgf(p.k, u);
  const double b = std::pow(f.mu + p.k * p.lambda * (1.0 - gx), f.alpha) - std::pow(f.mu, f.alpha);
  if (f.beta == 1.0) return std::exp(-t * b);
  const double x = std::pow(t * f.nu, f.beta);
  long double total = 0.0L;
  int quiet = 0;
  for (int r = 0; r <= trunc.r_max; ++r) {
    // Inner m-series: terms behave like (nu t)^m / m! once m exceeds nu t.
    long double shell = 0.0L;
    bool converged = false;
    for (int m = 0; m <= trunc.m_max; ++m) {
      const double log_scale = (f.beta * r + m) * std::log(t) + (m == 0 ? 0.0 : m * std::log(f.nu));
      if (f.nu == 0.0 && m > 0) {
        converged = true;
        break;
      }
      const double pr = prabhakar_ml(f.beta, f.beta * r + m + 1.0, r, x, ctl);
      const long double term = std::exp(static_cast<long double>(log_scale)) * pr;
      shell += term;
      if (m > f.nu * t + 1.0 && std::fabs(term) <= 1e-17L * std::fabs(shell)) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NonConvergence("ttsfppok_pgf: inner series did not converge within m_max");
    const long double contrib = std::pow(static_cast<long double>(-b), r) * shell;
    total += contrib;
    if (!std::isfinite(static_cast<double>(total))) throw NonConvergence("ttsfppok_pgf: series overflow");
    quiet = std::fabs(contrib) <= 1e-14L * std::fabs(total) ? quiet + 1 : 0;
    if (quiet >= 5) return static_cast<double>(std::exp(-static_cast<long double>(t) * f.nu) * total);
  }
  throw NonConvergence("ttsfppok_pgf: outer series failed the Cauchy criterion within r_max");
}

// ---------------------------------------------------------------- samplers

/// N^k(s) at a fixed clock value s: independent Poisson(lambda s) counts of each
/// jump size j = 1..k (thinning), weighted by j. Saturates at int64 range.
inline std::int64_t sample_ppok_count(const OrderParams& p, double s, RngStream& rng) {
  if (!(s >= 0.0)) throw DomainError("sample_ppok_count: clock must be >= 0");
  const double mean = p.lambda * s;
  if (mean == 0.0) return 0;
  constexpr double kSaturate = 1e17;
  if (!(mean < kSaturate)) return std::numeric_limits<std::int64_t>::max() / 2;
  std::poisson_distribution<std::int64_t> pois(mean);
  std::int64_t total = 0;
  for (int j = 1; j <= p.k; ++j) total += j * pois(rng);
  return total;
}

inline MarkedEventPath sample_ppok_path(const OrderParams& p, double horizon, RngStream& rng) {
  p.validate();
  if (!(horizon > 0.0)) throw DomainError("sample_ppok_path: horizon must be > 0");
  MarkedEventPath path;
  path.horizon = horizon;
  const double rate = p.k * p.lambda;
  std::uniform_int_distribution<int> mark(1, p.k);
  double time = 0.0;
  std::int64_t count = 0;
  for (;;) {
    time += rng.exponential() / rate;
    if (time > horizon) break;
    const int m = mark(rng);
    count += m;
    path.event_times.push_back(time);
    path.marks.push_back(m);
    path.counts.push_back(count);
  }
  return path;
}

/// N^k evaluated at time t of a marked path (sum of marks of events <= t).
inline std::int64_t count_at(const MarkedEventPath& path, double t) {
  std::int64_t c = 0;
  for (std::size_t i = 0; i < path.event_times.size() && path.event_times[i] <= t; ++i) c = path.counts[i];
  return c;
}

/// Step used by the grid inverse inside sample_fractional: 1e-3 * t.
inline constexpr double kInverseStepFraction = 1e-3;

/// Time-fractional clock E_beta(t): exact for the stable inverse, t itself for beta = 1.
inline double sample_tf_clock(double beta, double t, RngStream& rng) {
  return beta == 1.0 ? t : sample_inverse_stable_exact(beta, t, rng);
}

/// One draw of the variant's count at time t:
///   TF   N^k(E_beta(t))
///   SF   N^k(S_alpha(t))
///   TTSF N^k(S_{alpha,mu}(E_{beta,nu}(t)))
inline std::int64_t sample_fractional(const OrderParams& p, const FracParams& f, Variant variant, double t,
                                      RngStream& rng) {
  p.validate();
  f.validate();
  detail::check_t(t, "sample_fractional");
  switch (variant) {
    case Variant::PPoK: return sample_ppok_count(p, t, rng);
    case Variant::TF: return sample_ppok_count(p, sample_tf_clock(f.beta, t, rng), rng);
    case Variant::SF: {
      const double s = f.alpha == 1.0 ? t : detail::stable_increment(f.alpha, t, rng);
      return sample_ppok_count(p, s, rng);
    }
    case Variant::TTSF: {
      double e = t;
      if (f.beta < 1.0) {
        e = f.nu == 0.0 ? sample_inverse_stable_exact(f.beta, t, rng)
                        : sample_inverse(SubordinatorSpec::tempered_stable(f.beta, f.nu), t,
                                         kInverseStepFraction * t, rng);
      }
      double s = e;
      if (f.alpha < 1.0) {
        s = f.mu == 0.0 ? detail::stable_increment(f.alpha, e, rng)
                        : detail::tempered_increment(f.alpha, f.mu, e, rng);
      }
      return sample_ppok_count(p, s, rng);
    }
    case Variant::Field: break;
  }
  throw DomainError("sample_fractional: variant must be PPoK, TF, SF or TTSF");
}

}  // namespace fracppk
