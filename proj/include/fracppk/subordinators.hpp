#pragma once

// Driftless subordinators with Laplace exponents
//   stable            s^a
//   mixed stable      sum c_i s^{a_i}
//   tempered stable   (s + mu)^a - mu^a
//   mixture tempered  sum c_i ((s + mu_i)^{a_i} - mu_i^{a_i})
//   gamma             p log(1 + s / rate)
//   inverse Gaussian  delta (sqrt(2 s + gamma^2) - gamma)
// together with exact increment samplers and grid-based inverse (first passage) sampling.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fracppk/errors.hpp"
#include "fracppk/rng.hpp"

namespace fracppk {

enum class SubordinatorKind { Stable, MixedStable, TemperedStable, MixtureTemperedStable, Gamma, InverseGaussian };

inline const char* to_string(SubordinatorKind kind) {
  switch (kind) {
    case SubordinatorKind::Stable: return "stable";
    case SubordinatorKind::MixedStable: return "mixed-stable";
    case SubordinatorKind::TemperedStable: return "tempered-stable";
    case SubordinatorKind::MixtureTemperedStable: return "mixture-tempered-stable";
    case SubordinatorKind::Gamma: return "gamma";
    case SubordinatorKind::InverseGaussian: return "inverse-gaussian";
  }
  return "unknown";
}

/// One subordinator law. Stable-type kinds store their components in
/// (weights, alphas, mus); a single stable law has weights = {1} and mus = {0}.
struct SubordinatorSpec {
  SubordinatorKind kind = SubordinatorKind::Stable;
  std::vector<double> weights{1.0};
  std::vector<double> alphas{0.5};
  std::vector<double> mus{0.0};
  double p = 1.0;      // gamma shape rate
  double rate = 1.0;   // gamma scale parameter alpha
  double delta = 1.0;  // inverse Gaussian
  double gamma = 1.0;  // inverse Gaussian

  static SubordinatorSpec stable(double alpha) {
    return make(SubordinatorKind::Stable, {1.0}, {alpha}, {0.0});
  }
  static SubordinatorSpec mixed_stable(std::vector<double> c, std::vector<double> alpha) {
    std::vector<double> mu(c.size(), 0.0);
    return make(SubordinatorKind::MixedStable, std::move(c), std::move(alpha), std::move(mu));
  }
  static SubordinatorSpec tempered_stable(double alpha, double mu) {
    return make(SubordinatorKind::TemperedStable, {1.0}, {alpha}, {mu});
  }
  static SubordinatorSpec mixture_tempered_stable(std::vector<double> c, std::vector<double> alpha,
                                                  std::vector<double> mu) {
    return make(SubordinatorKind::MixtureTemperedStable, std::move(c), std::move(alpha), std::move(mu));
  }
  static SubordinatorSpec gamma_law(double p, double rate) {
    SubordinatorSpec s;
    s.kind = SubordinatorKind::Gamma;
    s.p = p;
    s.rate = rate;
    s.validate();
    return s;
  }
  static SubordinatorSpec inverse_gaussian(double delta, double gamma) {
    SubordinatorSpec s;
    s.kind = SubordinatorKind::InverseGaussian;
    s.delta = delta;
    s.gamma = gamma;
    s.validate();
    return s;
  }

  bool is_stable_type() const {
    return kind == SubordinatorKind::Stable || kind == SubordinatorKind::MixedStable ||
           kind == SubordinatorKind::TemperedStable || kind == SubordinatorKind::MixtureTemperedStable;
  }

  void validate() const {
    if (is_stable_type()) {
      if (weights.empty() || weights.size() != alphas.size() || weights.size() != mus.size()) {
        throw DomainError("SubordinatorSpec: component vectors must be non-empty and of equal length");
      }
      double total = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0)) throw DomainError("SubordinatorSpec: weights must be >= 0");
        if (!(alphas[i] > 0.0 && alphas[i] < 1.0)) throw DomainError("SubordinatorSpec: indices must lie in (0,1)");
        const bool tempered =
            kind == SubordinatorKind::TemperedStable || kind == SubordinatorKind::MixtureTemperedStable;
        if (tempered ? !(mus[i] > 0.0) : mus[i] != 0.0) {
          throw DomainError("SubordinatorSpec: tempering must be > 0 for tempered kinds and 0 otherwise");
        }
        total += weights[i];
      }
      if (std::fabs(total - 1.0) > 1e-12) throw DomainError("SubordinatorSpec: weights must sum to 1");
    } else if (kind == SubordinatorKind::Gamma) {
      if (!(p > 0.0) || !(rate > 0.0)) throw DomainError("SubordinatorSpec: gamma needs p > 0, rate > 0");
    } else {
      if (!(delta > 0.0) || !(gamma > 0.0)) throw DomainError("SubordinatorSpec: inverse Gaussian needs delta, gamma > 0");
    }
  }

 private:
  static SubordinatorSpec make(SubordinatorKind kind, std::vector<double> c, std::vector<double> a,
                               std::vector<double> mu) {
    SubordinatorSpec s;
    s.kind = kind;
    s.weights = std::move(c);
    s.alphas = std::move(a);
    s.mus = std::move(mu);
    s.validate();
    return s;
  }
};

/// Values of a subordinator on a time grid.
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
};

/// Laplace exponent f(s), so that E exp(-s L(t)) = exp(-t f(s)).
inline double laplace_exponent(const SubordinatorSpec& spec, double s) {
  if (!(s >= 0.0)) throw DomainError("laplace_exponent: s must be >= 0");
  switch (spec.kind) {
    case SubordinatorKind::Gamma: return spec.p * std::log1p(s / spec.rate);
    case SubordinatorKind::InverseGaussian:
      return spec.delta * (std::sqrt(2.0 * s + spec.gamma * spec.gamma) - spec.gamma);
    default: {
      double f = 0.0;
      for (std::size_t i = 0; i < spec.weights.size(); ++i) {
        const double a = spec.alphas[i], mu = spec.mus[i];
        f += spec.weights[i] * (std::pow(s + mu, a) - std::pow(mu, a));
      }
      return f;
    }
  }
}

namespace detail {

// Kanter's representation of the positive stable law with E exp(-s S) = exp(-s^a).
inline double stable_unit(double a, RngStream& rng) {
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double log_s = std::log(std::sin(a * u)) - std::log(std::sin(u)) / a +
                       (1.0 - a) / a * (std::log(std::sin((1.0 - a) * u)) - std::log(e));
  return std::exp(log_s);
}

inline double stable_increment(double a, double dt, RngStream& rng) {
  return std::pow(dt, 1.0 / a) * stable_unit(a, rng);
}

// Exponential tilting of the stable law: propose S(dt), accept with
// probability exp(-mu S). Long steps are split so the acceptance rate
// exp(-dt mu^a) stays above e^{-1}.
inline double tempered_increment(double a, double mu, double dt, RngStream& rng) {
  const double cost = dt * std::pow(mu, a);
  const auto pieces = static_cast<std::size_t>(std::ceil(std::fmax(cost, 1.0)));
  const double h = dt / static_cast<double>(pieces);
  double total = 0.0;
  for (std::size_t i = 0; i < pieces; ++i) {
    for (;;) {
      const double x = stable_increment(a, h, rng);
      if (rng.uniform() <= std::exp(-mu * x)) {
        total += x;
        break;
      }
    }
  }
  return total;
}

// Michael-Schucany-Haas sampler for IG(mean m, shape l).
inline double inverse_gaussian_draw(double m, double l, RngStream& rng) {
  std::normal_distribution<double> normal;
  const double y = normal(rng);
  const double r = m * y * y / (2.0 * l);
  const double x = m / (1.0 + r + std::sqrt(2.0 * r + r * r));  // = m + m r - m sqrt(2r + r^2), stable form
  return rng.uniform() * (m + x) <= m ? x : m * m / x;
}

}  // namespace detail

/// One draw of L(dt), independent of every other draw from rng.
inline double sample_increment(const SubordinatorSpec& spec, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw DomainError("sample_increment: dt must be > 0");
  switch (spec.kind) {
    case SubordinatorKind::Gamma: {
      std::gamma_distribution<double> g(spec.p * dt, 1.0 / spec.rate);
      return g(rng);
    }
    case SubordinatorKind::InverseGaussian: {
      const double m = spec.delta * dt / spec.gamma;
      const double l = (spec.delta * dt) * (spec.delta * dt);
      return detail::inverse_gaussian_draw(m, l, rng);
    }
    default: {
      // Independent components with exponents c_i f_i: L_i(c_i dt), summed.
      double total = 0.0;
      for (std::size_t i = 0; i < spec.weights.size(); ++i) {
        if (spec.weights[i] == 0.0) continue;
        const double h = spec.weights[i] * dt;
        total += spec.mus[i] > 0.0 ? detail::tempered_increment(spec.alphas[i], spec.mus[i], h, rng)
                                   : detail::stable_increment(spec.alphas[i], h, rng);
      }
      return total;
    }
  }
}

/// Path on the grid 0, step, 2 step, ..., horizon (last cell shortened to land on horizon).
inline PathSample sample_path(const SubordinatorSpec& spec, double horizon, double step, RngStream& rng) {
  if (!(horizon > 0.0) || !(step > 0.0) || !(step < horizon)) {
    throw DomainError("sample_path: need 0 < step < horizon");
  }
  const auto cells = static_cast<std::size_t>(std::ceil(horizon / step - 1e-12));
  PathSample path;
  path.times.resize(cells + 1);
  path.values.resize(cells + 1);
  path.times[0] = 0.0;
  path.values[0] = 0.0;
  for (std::size_t i = 1; i <= cells; ++i) {
    path.times[i] = i == cells ? horizon : step * static_cast<double>(i);
    path.values[i] = path.values[i - 1] + sample_increment(spec, path.times[i] - path.times[i - 1], rng);
  }
  return path;
}

/// Default cap on grid steps taken by the inverse samplers.
inline constexpr std::size_t kInverseMaxSteps = 50'000'000;

/// H(t_j) = inf{u : L(u) > t_j} for increasing targets t_j, all read off one
/// path simulated on the grid u = step, 2 step, ...; each value is the first
/// grid time at which the path exceeds the target (upward bias at most step).
inline std::vector<double> sample_inverse_at(const SubordinatorSpec& spec, const std::vector<double>& targets,
                                             double step, RngStream& rng,
                                             std::size_t max_steps = kInverseMaxSteps) {
  if (!(step > 0.0)) throw DomainError("sample_inverse: step must be > 0");
  for (std::size_t j = 0; j < targets.size(); ++j) {
    if (!(targets[j] > 0.0) || (j > 0 && targets[j] < targets[j - 1])) {
      throw DomainError("sample_inverse: targets must be positive and nondecreasing");
    }
  }
  std::vector<double> out(targets.size());
  double level = 0.0;
  std::size_t steps = 0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    while (level <= targets[j]) {
      if (steps == max_steps) throw HorizonOverflow("sample_inverse: crossing not reached within step budget");
      level += sample_increment(spec, step, rng);
      ++steps;
    }
    out[j] = step * static_cast<double>(steps);
  }
  return out;
}

/// First grid time u with L(u) > t.
inline double sample_inverse(const SubordinatorSpec& spec, double t, double step, RngStream& rng,
                             std::size_t max_steps = kInverseMaxSteps) {
  return sample_inverse_at(spec, {t}, step, rng, max_steps)[0];
}

/// Grid inverse with the default step 1e-3 * t.
inline double sample_inverse(const SubordinatorSpec& spec, double t, RngStream& rng) {
  if (!(t > 0.0)) throw DomainError("sample_inverse: t must be > 0");
  return sample_inverse(spec, t, 1e-3 * t, rng);
}

/// Exact inverse of the stable subordinator: E(t) = (t / S(1))^a by self-similarity.
inline double sample_inverse_stable_exact(double alpha, double t, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("sample_inverse_stable_exact: alpha must lie in (0,1)");
  if (!(t > 0.0)) throw DomainError("sample_inverse_stable_exact: t must be > 0");
  return std::pow(t / detail::stable_unit(alpha, rng), alpha);
}

}  // namespace fracppk
