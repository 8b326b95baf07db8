// Sum multiplexing gain of the hopping network, the fair hopping parameter,
// the two-generator construction of a non-integer mean hop count, and the
// per-slot sub-band sampler.

#pragma once

#include <optional>
#include <vector>

#include "fhs/model.hpp"
#include "fhs/random.hpp"

namespace fhs {

// Mean hop counts vbar_1..vbar_N, each in [0, u].
struct SmgProfile {
  std::vector<double> vbar;

  void validate(double u) const;
};

// sum_i vbar_i / 2 * prod_{k != i} (1 - vbar_k / u).
double smg(const SmgProfile& profile, double u);

// Every one of n users hops over v sub-bands: (n / 2) v (1 - v / u)^(n - 1).
double smg_fair(double v, int n, double u);

// argmax_v smg_fair(v, n, u) = u / n.
double v_opt(int n, double u);

// Hop over v_floor sub-bands with probability mu, else v_ceil, so that the
// mean is the requested real v.
struct IntegerHopMixture {
  int v_floor = 0;
  int v_ceil = 1;
  double mu = 1.0;

  double mean() const noexcept { return mu * v_floor + (1.0 - mu) * v_ceil; }
  HoppingProfile to_profile(int u) const;
};

// v_floor = min(floor(v), u - 1) and v_ceil = v_floor + 1, so v = u maps to
// (u - 1, u, 0) and the law stays on 0..u.
IntegerHopMixture integer_hop_mixture(double v, int u);

// Draws a hop count from the profile, then a uniform subset of that size.
// The result is sorted ascending.
std::vector<int> sample_hop(const HoppingProfile& profile, int u, CounterRng& rng);
// Same draw into a caller-owned buffer.
void sample_hop(const HoppingProfile& profile, int u, CounterRng& rng, std::vector<int>& out);

// sum_i log2(vbar_i / 2 * prod_{k != i} (1 - vbar_k / u)); -infinity when a
// term is zero. With gamma set, adds the N log2 log2 gamma part of the
// high-SNR expansion of the sum of log-rates.
double proportional_fair_objective(const SmgProfile& profile, double u,
                                   std::optional<double> gamma = std::nullopt);

}  // namespace fhs
