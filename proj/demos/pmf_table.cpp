// Prints P(N = n) for the PPoK and its time- and space-fractional versions,
// then compares the TF pmf with a Monte Carlo estimate.

#include <cstdio>

#include "fracppk/fracppk.hpp"

int main() {
  using namespace fracppk;
  const OrderParams p{2, 1.0};
  const double t = 1.0;
  const int n_max = 10;

  const auto ppok = ppok_pmf_table(p, t, n_max);
  const auto tf = tfppok_pmf_table(p, 0.7, t, n_max);
  const auto sf = sfppok_pmf_table(p, 0.7, t, n_max);

  const auto mc = estimate_pmf([&](RngStream& rng) { return sample_fractional(p, {1.0, 0.7, 0.0, 0.0}, Variant::TF, t, rng); },
                               n_max, 100'000, 42);

  std::printf("%3s %12s %12s %12s %12s\n", "n", "ppok", "tfppok", "tf (MC)", "sfppok");
  for (int n = 0; n <= n_max; ++n) {
    const auto i = static_cast<std::size_t>(n);
    std::printf("%3d %12.6f %12.6f %12.6f %12.6f\n", n, ppok.probs[i], tf.probs[i], mc.probs[i], sf.probs[i]);
  }
  std::printf("TV(tf, MC) = %.4f\n", compare_pmf(mc, tf).tv_distance);
  return 0;
}
