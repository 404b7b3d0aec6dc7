#pragma once

// Homogeneous Poisson fields of order k on axis-aligned boxes, and the
// time-/space-fractional fields obtained by replacing each box side t_j with
// an inverse stable clock E_j(t_j) or a stable clock S_j(t_j).

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fracppk/combinatorics.hpp"
#include "fracppk/errors.hpp"
#include "fracppk/parallel.hpp"
#include "fracppk/processes.hpp"
#include "fracppk/rng.hpp"
#include "fracppk/subordinators.hpp"

namespace fracppk {

/// Box [lower_1, upper_1) x ... x [lower_d, upper_d).
struct BoxRegion {
  std::vector<double> lower;
  std::vector<double> upper;

  static BoxRegion unit(std::size_t d) { return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)}; }

  std::size_t dim() const { return lower.size(); }

  void validate() const {
    if (lower.empty() || lower.size() != upper.size()) throw DomainError("BoxRegion: bounds must be non-empty and of equal length");
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] <= upper[i])) {
        throw DomainError("BoxRegion: need finite lower <= upper in every coordinate");
      }
    }
  }

  double measure() const {
    validate();
    double m = 1.0;
    for (std::size_t i = 0; i < lower.size(); ++i) m *= upper[i] - lower[i];
    return m;
  }

  bool contains(const BoxRegion& other) const {
    if (other.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (other.lower[i] < lower[i] || other.upper[i] > upper[i]) return false;
    }
    return true;
  }

  bool contains_point(const double* x) const {
    for (std::size_t i = 0; i < dim(); ++i) {
      if (!(x[i] >= lower[i] && x[i] < upper[i])) return false;
    }
    return true;
  }
};

/// Points (row-major, d coordinates each) with marks in 1..k.
struct MarkedPointField {
  BoxRegion ambient;
  std::vector<double> coords;
  std::vector<int> marks;

  std::size_t size() const { return marks.size(); }
  const double* point(std::size_t i) const { return coords.data() + i * ambient.dim(); }
};

enum class ClockVariant { TimeFractional, SpaceFractional };

/// Per-axis clocks: index beta_j (time-fractional) or alpha_j (space-fractional) and time t_j.
struct ClockVector {
  ClockVariant variant = ClockVariant::TimeFractional;
  std::vector<double> indices;
  std::vector<double> times;

  std::size_t m() const { return indices.size(); }

  void validate() const {
    if (indices.empty() || indices.size() != times.size()) throw DomainError("ClockVector: need m >= 1 indices and times");
    for (std::size_t j = 0; j < indices.size(); ++j) {
      if (!(indices[j] > 0.0 && indices[j] < 1.0)) throw DomainError("ClockVector: indices must lie in (0,1)");
      if (!(times[j] > 0.0)) throw DomainError("ClockVector: times must be > 0");
    }
  }
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct FieldMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// P(X^k(A) = n) with m_d(A) = area.
inline double field_pmf(const OrderParams& p, double area, int n) {
  p.validate();
  if (!(area >= 0.0) || !std::isfinite(area)) throw DomainError("field_pmf: area must be >= 0");
  if (n < 0) throw DomainError("field_pmf: n must be >= 0");
  if (n > kNCap) throw CapExceeded("field_pmf: n exceeds cap of " + std::to_string(kNCap));
  return order_k_poisson_pmf(p.k, n, p.lambda * area);
}

inline PmfTable field_pmf_table(const OrderParams& p, double area, int n_max) {
  PmfTable table{Variant::Field, p, FracParams{}, area, {}, 0.0};
  for (int n = 0; n <= n_max; ++n) table.probs.push_back(field_pmf(p, area, n));
  double total = 0.0;
  for (double q : table.probs) total += q;
  table.truncation_mass = 1.0 - total;
  return table;
}

/// P(X(A2) = m | X(A1) = n) for A2 inside A1: the e^{-k lambda area} factors cancel,
/// leaving K(area2, m) K(area1 - area2, n - m) / K(area1, n) with K the Omega kernel.
inline double field_conditional_pmf(const OrderParams& p, double area1, double area2, int n, int m) {
  p.validate();
  if (!(area2 >= 0.0)) throw DomainError("field_conditional_pmf: area2 must be >= 0");
  if (!(area2 <= area1)) throw DomainError("field_conditional_pmf: area2 must not exceed area1");
  if (n < 0 || m < 0 || m > n) throw DomainError("field_conditional_pmf: need 0 <= m <= n");
  if (n > kNCap) throw CapExceeded("field_conditional_pmf: n exceeds cap of " + std::to_string(kNCap));
  if (area1 == 0.0) throw DomainError("field_conditional_pmf: area1 must be > 0");
  auto kernel = [&](double area, int j) {
    return area == 0.0 ? (j == 0 ? 1.0 : 0.0) : omega_kernel(p.k, j, p.lambda * area);
  };
  return kernel(area2, m) * kernel(area1 - area2, n - m) / kernel(area1, n);
}

inline FieldMoments field_moments(const OrderParams& p, double area) {
  p.validate();
  if (!(area >= 0.0)) throw DomainError("field_moments: area must be >= 0");
  const double k = p.k;
  return {k * (k + 1.0) / 2.0 * p.lambda * area, k * (k + 1.0) * (2.0 * k + 1.0) / 6.0 * p.lambda * area};
}

/// Poisson(k lambda m_d(ambient)) uniform points with iid uniform marks.
/// A zero-measure box yields an empty field.
inline MarkedPointField sample_field(const OrderParams& p, const BoxRegion& ambient, RngStream& rng) {
  p.validate();
  const double vol = ambient.measure();
  MarkedPointField field;
  field.ambient = ambient;
  if (vol == 0.0) return field;
  std::poisson_distribution<std::int64_t> pois(p.k * p.lambda * vol);
  const auto count = static_cast<std::size_t>(pois(rng));
  std::uniform_int_distribution<int> mark(1, p.k);
  const std::size_t d = ambient.dim();
  field.coords.resize(count * d);
  field.marks.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      double x = ambient.lower[c] + (ambient.upper[c] - ambient.lower[c]) * rng.uniform();
      if (x >= ambient.upper[c]) x = std::nextafter(ambient.upper[c], ambient.lower[c]);
      field.coords[i * d + c] = x;
    }
    field.marks[i] = mark(rng);
  }
  return field;
}

/// Sum of marks of points in query (closed lower, open upper faces).
inline std::int64_t count_in_region(const MarkedPointField& field, const BoxRegion& query) {
  query.validate();
  if (!field.ambient.contains(query)) throw DomainError("count_in_region: query must lie inside the ambient box");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (query.contains_point(field.point(i))) total += field.marks[i];
  }
  return total;
}

namespace detail {

inline double sample_clock_area(const ClockVector& clock, RngStream& rng) {
  double area = 1.0;
  for (std::size_t j = 0; j < clock.m(); ++j) {
    area *= clock.variant == ClockVariant::TimeFractional
                ? sample_inverse_stable_exact(clock.indices[j], clock.times[j], rng)
                : stable_increment(clock.indices[j], clock.times[j], rng);
  }
  return area;
}

}  // namespace detail

/// Monte Carlo estimates of P(N^k(x_1, ..., x_m) = n), n = 0..n_max, with the box
/// sides x_j drawn from the per-axis clocks; each estimate is the sample mean of
/// field_pmf(p, x_1 ... x_m, n) with its standard error.
inline std::vector<Estimate> fractional_field_pmf_all(const OrderParams& p, const ClockVector& clock, int n_max,
                                                      std::size_t samples, std::uint64_t seed) {
  p.validate();
  clock.validate();
  if (n_max < 0 || n_max > kNCap) throw CapExceeded("fractional_field_pmf: n_max must lie in [0, 60]");
  if (samples < 1000) throw DomainError("fractional_field_pmf: need at least 1000 samples");
  const auto areas = parallel_draws<double>(samples, seed, 0x46, [&](RngStream& rng, std::size_t) {
    return detail::sample_clock_area(clock, rng);
  });
  std::vector<Estimate> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    long double sum = 0.0L, sum_sq = 0.0L;
    for (double a : areas) {
      const long double v = field_pmf(p, a, n);
      sum += v;
      sum_sq += v * v;
    }
    const long double N = static_cast<long double>(samples);
    const long double mean = sum / N;
    const long double var = std::fmax(0.0L, (sum_sq - N * mean * mean) / (N - 1.0L));
    out[static_cast<std::size_t>(n)] = {static_cast<double>(mean), static_cast<double>(std::sqrt(var / N))};
  }
  return out;
}

inline Estimate fractional_field_pmf(const OrderParams& p, const ClockVector& clock, int n, std::size_t samples,
                                     std::uint64_t seed) {
  if (n < 0) throw DomainError("fractional_field_pmf: n must be >= 0");
  return fractional_field_pmf_all(p, clock, n, samples, seed)[static_cast<std::size_t>(n)];
}

/// Mean and variance of the time-fractional field at (t_1, ..., t_m).
inline FieldMoments fractional_field_moments(const OrderParams& p, const ClockVector& clock) {
  p.validate();
  clock.validate();
  if (clock.variant != ClockVariant::TimeFractional) {
    throw DomainError("fractional_field_moments: only the time-fractional field has finite moments");
  }
  const double k = p.k, lam = p.lambda;
  double mean_area = 1.0, second_area = 1.0;
  for (std::size_t j = 0; j < clock.m(); ++j) {
    const double b = clock.indices[j];
    const double tb = std::pow(clock.times[j], b);
    mean_area *= tb / std::tgamma(1.0 + b);
    second_area *= tb * tb / (b * std::tgamma(2.0 * b));
  }
  FieldMoments out;
  out.mean = lam * k * (k + 1.0) / 2.0 * mean_area;
  out.variance = k * (k + 1.0) * (2.0 * k + 1.0) * lam / 6.0 * mean_area +
                 lam * lam * k * k * (k + 1.0) * (k + 1.0) / 4.0 * (second_area - mean_area * mean_area);
  return out;
}

/// One draw of the fractional field count N^k(x_1, ..., x_m) with clock-driven sides.
inline std::int64_t sample_fractional_field(const OrderParams& p, const ClockVector& clock, RngStream& rng) {
  p.validate();
  clock.validate();
  return sample_ppok_count(p, detail::sample_clock_area(clock, rng), rng);
}

}  // namespace fracppk
