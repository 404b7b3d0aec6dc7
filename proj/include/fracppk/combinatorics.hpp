#pragma once

// The index set Omega(k, n) = {x in N^k : x_1 + 2 x_2 + ... + k x_k = n} and
// the kernel sum_{X in Omega(k,n)} w^zeta / Pi! shared by every order-k pmf.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "fracppk/detail/series.hpp"
#include "fracppk/errors.hpp"

namespace fracppk {

/// Largest n accepted by enumerate_omega and the pmfs built on it.
inline constexpr int kNCap = 60;
/// Largest |Omega(k,n)| that enumerate_omega will materialize.
inline constexpr std::size_t kOmegaCountCap = 1'000'000;

/// Order k and base rate lambda; jumps are uniform on {1..k} at total rate k*lambda.
struct OrderParams {
  int k = 1;
  double lambda = 1.0;

  void validate() const {
    if (k < 1) throw DomainError("OrderParams: k must be >= 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("OrderParams: lambda must be > 0");
  }
};

/// One element X of Omega(k, n), with zeta = sum x_i and log(Pi!) = sum log(x_i!).
struct Composition {
  std::vector<int> x;
  int zeta = 0;
  int n = 0;
  double log_factorial_product = 0.0;
};

namespace detail {

inline std::vector<Composition> build_omega(int k, int n) {
  std::vector<Composition> out;
  std::vector<int> x(static_cast<std::size_t>(k), 0);
  // Choose x_k, x_{k-1}, ..., x_2 with the remainder going to x_1; outer index ascending.
  auto recurse = [&](auto&& self, int part, int remaining) -> void {
    if (part == 1) {
      x[0] = remaining;
      Composition c;
      c.x = x;
      c.n = n;
      for (int v : x) {
        c.zeta += v;
        c.log_factorial_product += log_gamma(static_cast<double>(v) + 1.0);
      }
      out.push_back(std::move(c));
      if (out.size() > kOmegaCountCap || out.size() * x.size() > 50 * kOmegaCountCap) throw CapExceeded("enumerate_omega: |Omega(k,n)| exceeds cap");
      return;
    }
    for (int v = 0; v * part <= remaining; ++v) {
      x[static_cast<std::size_t>(part - 1)] = v;
      self(self, part - 1, remaining - v * part);
    }
    x[static_cast<std::size_t>(part - 1)] = 0;
  };
  recurse(recurse, k, n);
  return out;
}

class OmegaMemo {
 public:
  std::shared_ptr<const std::vector<Composition>> get(int k, int n) {
    const std::pair<int, int> key{k, n};
    {
      std::shared_lock lock(mutex_);
      if (auto it = table_.find(key); it != table_.end()) return it->second;
    }
    auto built = std::make_shared<const std::vector<Composition>>(build_omega(k, n));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = table_.emplace(key, std::move(built));
    return it->second;
  }

 private:
  std::shared_mutex mutex_;
  std::map<std::pair<int, int>, std::shared_ptr<const std::vector<Composition>>> table_;
};

inline OmegaMemo& omega_memo() {
  static OmegaMemo memo;
  return memo;
}

}  // namespace detail

/// All X with sum i*x_i = n, each exactly once. Order: x_k outermost ascending,
/// then x_{k-1}, ..., x_2, with x_1 the remainder. Results are memoized and immutable.
inline std::shared_ptr<const std::vector<Composition>> enumerate_omega(int k, int n) {
  if (k < 1) throw DomainError("enumerate_omega: k must be >= 1");
  if (n < 0) throw DomainError("enumerate_omega: n must be >= 0");
  if (n > kNCap) throw CapExceeded("enumerate_omega: n exceeds cap of " + std::to_string(kNCap));
  return detail::omega_memo().get(k, n);
}

/// sum_{X in Omega(k,n)} w^zeta / Pi!, computed with log-factorials.
inline double omega_kernel(int k, int n, double w) {
  if (!(w > 0.0)) throw DomainError("omega_kernel: w must be > 0");
  const auto omega = enumerate_omega(k, n);
  const double log_w = std::log(w);
  long double acc = 0.0L;
  for (const auto& c : *omega) acc += std::exp(static_cast<long double>(c.zeta * log_w - c.log_factorial_product));
  return static_cast<double>(acc);
}

/// e^{-k w} sum_{X in Omega(k,n)} w^zeta / Pi!, the order-k Poisson law with
/// mean measure w per jump size, evaluated term by term in log space so that
/// large w underflows to 0 instead of producing 0 * inf. w = 0 gives [n == 0].
inline double order_k_poisson_pmf(int k, int n, double w) {
  if (!(w >= 0.0)) throw DomainError("order_k_poisson_pmf: w must be >= 0");
  const auto omega = enumerate_omega(k, n);
  if (w == 0.0) return n == 0 ? 1.0 : 0.0;
  const long double log_w = std::log(static_cast<long double>(w));
  const long double shift = static_cast<long double>(k) * w;
  long double acc = 0.0L;
  for (const auto& c : *omega) acc += std::exp(c.zeta * log_w - c.log_factorial_product - shift);
  return static_cast<double>(acc);
}

/// c_zeta = sum_{X in Omega(k,n), zeta_X = zeta} 1/Pi!, indexed by zeta = 0..n.
inline std::vector<double> zeta_weights(int k, int n) {
  const auto omega = enumerate_omega(k, n);
  std::vector<long double> acc(static_cast<std::size_t>(n) + 1, 0.0L);
  for (const auto& c : *omega) acc[static_cast<std::size_t>(c.zeta)] += std::exp(-static_cast<long double>(c.log_factorial_product));
  return {acc.begin(), acc.end()};
}

}  // namespace fracppk
