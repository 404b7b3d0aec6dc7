#pragma once

// Monte Carlo goodness of fit, governing-equation residuals, the fractional
// difference operator, and the martingale test for inverse-subordinator clocks.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracppk/errors.hpp"
#include "fracppk/parallel.hpp"
#include "fracppk/processes.hpp"
#include "fracppk/specfun.hpp"
#include "fracppk/subordinators.hpp"

namespace fracppk {

struct EmpiricalPmf {
  std::vector<double> probs;       // frequency of n = 0..n_max
  std::vector<double> std_errors;  // binomial standard errors
  double tail = 0.0;               // frequency of n > n_max
  std::size_t n_samples = 0;
};

struct GofReport {
  double tv_distance = 0.0;
  double chi2_stat = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::size_t n_samples = 0;
};

inline EmpiricalPmf empirical_from_counts(const std::vector<std::int64_t>& draws, int n_max) {
  if (n_max < 0) throw DomainError("estimate_pmf: n_max must be >= 0");
  EmpiricalPmf e;
  e.n_samples = draws.size();
  std::vector<std::size_t> hist(static_cast<std::size_t>(n_max) + 1, 0);
  std::size_t tail = 0;
  for (auto v : draws) {
    if (v < 0) throw DomainError("estimate_pmf: sampler returned a negative count");
    if (v > n_max) ++tail;
    else ++hist[static_cast<std::size_t>(v)];
  }
  const double N = static_cast<double>(draws.size());
  for (auto h : hist) {
    const double q = static_cast<double>(h) / N;
    e.probs.push_back(q);
    e.std_errors.push_back(std::sqrt(q * (1.0 - q) / N));
  }
  e.tail = static_cast<double>(tail) / N;
  return e;
}

/// Frequencies of sampler(rng) over N independent draws (deterministic in seed).
template <class Sampler>
EmpiricalPmf estimate_pmf(Sampler&& sampler, int n_max, std::size_t N, std::uint64_t seed,
                          std::uint64_t stream_base = 1) {
  if (N < 1000) throw DomainError("estimate_pmf: need at least 1000 samples");
  const auto draws = parallel_draws<std::int64_t>(N, seed, stream_base, [&](RngStream& rng, std::size_t) {
    return static_cast<std::int64_t>(sampler(rng));
  });
  return empirical_from_counts(draws, n_max);
}

/// TV distance and Pearson chi^2 between an empirical pmf and an analytic table.
/// The mass beyond n_max forms a final tail bin on both sides; adjacent bins are
/// pooled left to right until every expected count is at least 5.
inline GofReport compare_pmf(const EmpiricalPmf& empirical, const PmfTable& analytic) {
  if (empirical.probs.size() != analytic.probs.size()) throw DomainError("compare_pmf: supports differ");
  const std::size_t bins = analytic.probs.size() + 1;
  std::vector<double> expected(bins), observed(bins);
  for (std::size_t i = 0; i + 1 < bins; ++i) {
    expected[i] = std::max(0.0, analytic.probs[i]);
    observed[i] = empirical.probs[i];
  }
  expected[bins - 1] = std::max(0.0, analytic.truncation_mass);
  observed[bins - 1] = empirical.tail;

  GofReport r;
  r.n_samples = empirical.n_samples;
  double tv = 0.0;
  for (std::size_t i = 0; i < bins; ++i) tv += std::fabs(expected[i] - observed[i]);
  r.tv_distance = std::min(1.0, 0.5 * tv);

  const double N = static_cast<double>(empirical.n_samples);
  std::vector<double> pe, po;
  double acc_e = 0.0, acc_o = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    acc_e += expected[i] * N;
    acc_o += observed[i] * N;
    if (acc_e >= 5.0) {
      pe.push_back(acc_e);
      po.push_back(acc_o);
      acc_e = acc_o = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (pe.empty()) {
      pe.push_back(acc_e);
      po.push_back(acc_o);
    } else {
      pe.back() += acc_e;
      po.back() += acc_o;
    }
  }
  if (pe.size() < 2) throw DegenerateBins("compare_pmf: fewer than 2 bins after pooling");
  double chi2 = 0.0;
  for (std::size_t i = 0; i < pe.size(); ++i) {
    if (pe[i] <= 0.0) {
      if (po[i] > 0.0) chi2 = INFINITY;
      continue;
    }
    chi2 += (po[i] - pe[i]) * (po[i] - pe[i]) / pe[i];
  }
  r.chi2_stat = chi2;
  r.dof = static_cast<int>(pe.size()) - 1;
  r.p_value = std::isfinite(chi2) ? boost::math::gamma_q(0.5 * r.dof, 0.5 * chi2) : 0.0;
  return r;
}

/// (1 - B)^alpha applied to seq with the binomial series truncated at j_max:
/// out[i] = sum_{j=0}^{min(i, j_max)} binom(alpha, j) (-1)^j seq[i - j].
inline std::vector<double> fractional_difference(const std::vector<double>& seq, double alpha, std::size_t j_max) {
  if (j_max > seq.size()) throw DomainError("fractional_difference: j_max exceeds sequence length");
  std::vector<double> w(j_max + 1);
  w[0] = 1.0;
  for (std::size_t j = 1; j <= j_max; ++j) w[j] = w[j - 1] * (static_cast<double>(j) - 1.0 - alpha) / static_cast<double>(j);
  std::vector<double> out(seq.size(), 0.0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= std::min(i, j_max); ++j) acc += w[j] * seq[i - j];
    out[i] = acc;
  }
  return out;
}

/// Uniform grid 0, h, ..., horizon with `points` nodes. Residuals are reported
/// over nodes with t >= window_start * horizon.
struct ResidualGrid {
  double horizon = 1.0;
  std::size_t points = 500;
  double window_start = 0.1;

  void validate() const {
    if (!(horizon > 0.0)) throw DomainError("ResidualGrid: horizon must be > 0");
    if (points < 3) throw GridTooCoarse("ResidualGrid: need at least 3 points");
    if (!(window_start >= 0.0 && window_start < 1.0)) throw DomainError("ResidualGrid: window_start must lie in [0,1)");
  }
  double step() const { return horizon / static_cast<double>(points - 1); }
};

/// max_t |D^beta p(n,t) + k lambda p(n,t) - lambda sum_{j=1}^{min(n,k)} p(n-j,t)| / max_t |rhs(t)|
/// over the window, with D^beta the L1 Caputo scheme (backward difference for beta = 1).
inline double governing_residual_tf(const OrderParams& p, double beta, int n, const ResidualGrid& grid,
                                    const SeriesControl& ctl = {}) {
  p.validate();
  grid.validate();
  if (n < 0 || n > 5) throw DomainError("governing_residual_tf: n must lie in [0, 5]");
  const std::size_t N = grid.points;
  const double h = grid.step();
  std::vector<std::vector<double>> pmf(static_cast<std::size_t>(n) + 1, std::vector<double>(N, 0.0));
  for (int j = 0; j <= n; ++j) pmf[static_cast<std::size_t>(j)][0] = j == 0 ? 1.0 : 0.0;
  for (std::size_t i = 1; i < N; ++i) {
    const auto table = tfppok_pmf_table(p, beta, h * static_cast<double>(i), n, ctl);
    for (int j = 0; j <= n; ++j) pmf[static_cast<std::size_t>(j)][i] = table.probs[static_cast<std::size_t>(j)];
  }
  const auto g = GridFunction::uniform(h, pmf[static_cast<std::size_t>(n)]);
  const auto lhs = caputo_derivative_all(g, beta);
  double max_res = 0.0, max_rhs = 0.0;
  for (std::size_t i = 2; i < N; ++i) {
    if (h * static_cast<double>(i) < grid.window_start * grid.horizon) continue;
    double rhs = -p.k * p.lambda * pmf[static_cast<std::size_t>(n)][i];
    for (int j = 1; j <= std::min(n, p.k); ++j) rhs += p.lambda * pmf[static_cast<std::size_t>(n - j)][i];
    max_res = std::max(max_res, std::fabs(lhs[i] - rhs));
    max_rhs = std::max(max_rhs, std::fabs(rhs));
  }
  if (!(max_rhs > 0.0)) throw GridTooCoarse("governing_residual_tf: no grid points in the residual window");
  return max_res / max_rhs;
}

/// Central-difference residual of d/dt G = -(k lambda)^alpha (1 - G_X(u))^alpha G,
/// relative to max |rhs| over the interior grid nodes.
inline double governing_residual_sf_pgf(const OrderParams& p, double alpha, double u, const ResidualGrid& grid) {
  p.validate();
  grid.validate();
  if (!(u > 0.0 && u < 1.0)) throw DomainError("governing_residual_sf_pgf: u must lie in (0,1)");
  const double h = grid.step();
  const double rate = std::pow(p.k * p.lambda, alpha) * std::pow(1.0 - jump_pgf(p.k, u), alpha);
  auto G = [&](double t) { return t == 0.0 ? 1.0 : sfppok_pgf(p, alpha, t, u); };
  double max_res = 0.0, max_rhs = 0.0;
  for (std::size_t i = 1; i + 1 < grid.points; ++i) {
    const double t = h * static_cast<double>(i);
    if (t < grid.window_start * grid.horizon) continue;
    const double lhs = (G(t + h) - G(t - h)) / (2.0 * h);
    const double rhs = -rate * G(t);
    max_res = std::max(max_res, std::fabs(lhs - rhs));
    max_rhs = std::max(max_rhs, std::fabs(rhs));
  }
  if (!(max_rhs > 0.0)) throw GridTooCoarse("governing_residual_sf_pgf: no grid points in the residual window");
  return max_res / max_rhs;
}

// ---------------------------------------------------------------- martingale test

struct MartingaleReport {
  std::vector<double> grid;
  std::vector<double> mean_increment;            // E[M(t_i) - M(t_{i-1})], t_0 = 0
  std::vector<double> mean_increment_z;          // divided by its standard error
  std::vector<double> increment_vs_level_corr;   // corr(M(t_i) - M(t_{i-1}), M(t_{i-1})), i >= 2
  std::vector<double> increment_vs_level_z;
  std::vector<double> increment_vs_clock_corr;   // corr(M(t_i) - M(t_{i-1}), H(t_{i-1})), i >= 2
  std::vector<double> increment_vs_clock_z;
  double threshold = 3.0;
  std::size_t n_samples = 0;
  bool pass = false;
};

struct MartingaleOptions {
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;
  double clock_step = 1e-3;        // grid step of the subordinator path, relative to the last grid time
  bool negative_control = false;   // compensate with lambda t instead of lambda H(t)
  double family_level = 0.0027;    // two-sided level of a single 3-sigma test, Bonferroni-split
};

namespace detail {

struct MomentAccumulator {
  long double n = 0, sum = 0, sum_sq = 0;
  void add(long double x) {
    n += 1;
    sum += x;
    sum_sq += x * x;
  }
  double mean() const { return static_cast<double>(sum / n); }
  double variance() const {
    const long double m = sum / n;
    return static_cast<double>(std::max(0.0L, (sum_sq - n * m * m) / (n - 1)));
  }
};

// z-statistic for E[x y] = 0 with y centred at its sample mean; robust to
// heteroscedastic x.
inline std::pair<double, double> orthogonality_z(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double my = 0, mx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    my += y[i];
    mx += x[i];
  }
  my /= n;
  mx /= n;
  MomentAccumulator prod;
  long double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double dy = y[i] - my, dx = x[i] - mx;
    prod.add(x[i] * dy);
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double corr = (sxx > 0 && syy > 0) ? static_cast<double>(sxy / std::sqrt(sxx * syy)) : 0.0;
  const double se = std::sqrt(prod.variance() / static_cast<double>(n));
  const double z = se > 0.0 ? prod.mean() / se : 0.0;
  return {corr, z};
}

}  // namespace detail

/// Simulates M(t) = N(H(t)) - lambda H(t) on the grid, with N a unit-jump Poisson
/// process of rate lambda and H(t_i) = clock(rng, grid) the clock values at the grid
/// times from one shared path. Tests E[dM] = 0 and the orthogonality of dM to M(s)
/// and H(s) for consecutive pairs; thresholds are Bonferroni-adjusted normal quantiles.
template <class Clock>
MartingaleReport martingale_check_clock(Clock&& clock, double lambda, const std::vector<double>& grid,
                                  const MartingaleOptions& opt) {
  if (!(lambda > 0.0)) throw DomainError("martingale_check: lambda must be > 0");
  if (grid.size() < 2) throw DomainError("martingale_check: need at least 2 grid times");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) throw DomainError("martingale_check: grid must increase");
  }
  if (opt.samples < 10'000) throw DomainError("martingale_check: need at least 1e4 samples");
  const std::size_t g = grid.size();
  struct Row {
    std::vector<double> m, h;
  };
  const auto rows = parallel_draws<Row>(opt.samples, opt.seed, 0x4d, [&](RngStream& rng, std::size_t) {
    Row row;
    row.h = clock(rng, grid);
    row.m.resize(g);
    std::int64_t count = 0;
    double prev_h = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      if (row.h[i] > prev_h) {
        std::poisson_distribution<std::int64_t> pois(lambda * (row.h[i] - prev_h));
        count += pois(rng);
      }
      prev_h = row.h[i];
      const double comp = opt.negative_control ? lambda * grid[i] : lambda * row.h[i];
      row.m[i] = static_cast<double>(count) - comp;
    }
    return row;
  });

  MartingaleReport rep;
  rep.grid = grid;
  rep.n_samples = opt.samples;
  const std::size_t tests = g + 2 * (g - 1);
  boost::math::normal_distribution<double> normal;
  rep.threshold = boost::math::quantile(normal, 1.0 - opt.family_level / (2.0 * static_cast<double>(tests)));
  bool pass = true;
  std::vector<double> dm(opt.samples), level(opt.samples), clk(opt.samples);
  for (std::size_t i = 0; i < g; ++i) {
    detail::MomentAccumulator acc;
    for (std::size_t s = 0; s < opt.samples; ++s) {
      const auto& r = rows[s];
      dm[s] = r.m[i] - (i == 0 ? 0.0 : r.m[i - 1]);
      acc.add(dm[s]);
    }
    const double se = std::sqrt(acc.variance() / static_cast<double>(opt.samples));
    const double z = se > 0.0 ? acc.mean() / se : (acc.mean() == 0.0 ? 0.0 : INFINITY);
    rep.mean_increment.push_back(acc.mean());
    rep.mean_increment_z.push_back(z);
    pass = pass && std::fabs(z) <= rep.threshold;
    if (i == 0) continue;
    for (std::size_t s = 0; s < opt.samples; ++s) {
      level[s] = rows[s].m[i - 1];
      clk[s] = rows[s].h[i - 1];
    }
    const auto [c1, z1] = detail::orthogonality_z(dm, level);
    const auto [c2, z2] = detail::orthogonality_z(dm, clk);
    rep.increment_vs_level_corr.push_back(c1);
    rep.increment_vs_level_z.push_back(z1);
    rep.increment_vs_clock_corr.push_back(c2);
    rep.increment_vs_clock_z.push_back(z2);
    pass = pass && std::fabs(z1) <= rep.threshold && std::fabs(z2) <= rep.threshold;
  }
  rep.pass = pass;
  return rep;
}

/// Clock H_f read off one simulated subordinator path (first grid crossing).
struct InverseClock {
  SubordinatorSpec spec;
  double step;
  std::vector<double> operator()(RngStream& rng, const std::vector<double>& grid) const {
    return sample_inverse_at(spec, grid, step, rng);
  }
};

/// Deterministic clock H(t) = t (classical compensated Poisson process).
struct IdentityClock {
  std::vector<double> operator()(RngStream&, const std::vector<double>& grid) const { return grid; }
};

inline MartingaleReport martingale_check(const SubordinatorSpec& spec, double lambda, const std::vector<double>& grid,
                                         const MartingaleOptions& opt) {
  spec.validate();
  if (grid.empty()) throw DomainError("martingale_check: empty grid");
  return martingale_check_clock(InverseClock{spec, opt.clock_step * grid.back()}, lambda, grid, opt);
}

}  // namespace fracppk
