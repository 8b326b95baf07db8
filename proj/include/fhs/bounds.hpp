// Achievable-rate bounds for one user of the hopping network, the asymptotic
// multiplexing gain they share, the feedback-driven rate rule, and a
// Monte-Carlo estimate of the true mutual information. Rates are in bits per
// slot (per real channel use of the u sub-band vector).

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fhs/mixture.hpp"
#include "fhs/model.hpp"

namespace fhs {

// Upper bound: value = slope * log2(1 + |h_ii|^2 gamma / v_i) + residual.
// Lower bound: value = slope * log2(gamma) + residual.
// value and residual are empty when only the slope was computed.
struct RateBound {
  std::optional<double> value_bits;
  double slope_bits_per_log2snr = 0.0;
  std::optional<double> residual_bits;
};

enum class UpperBoundMode {
  exact,       // average the per-realization rates over every interferer placement
  slope_only,  // closed-form slope, residual unavailable
};

// Interferer placements enumerated by the exact upper bound beyond which it
// refuses to run.
inline constexpr std::size_t kMaxRealizations = 10'000'000;
// Largest vector mixture accepted by the Monte-Carlo mutual information.
inline constexpr std::size_t kMaxMixtureComponents = 10'000;

// E{F_i} = vbar_i prod_{k != i} (1 - vbar_k / u): the mean number of the user's
// sub-bands that no interferer touches.
double expected_free_subbands(const NetworkScenario& scenario,
                              std::span<const HoppingProfile> profiles, int user);

RateBound upper_bound_rate(const NetworkScenario& scenario,
                           std::span<const HoppingProfile> profiles, int user,
                           UpperBoundMode mode = UpperBoundMode::exact);

RateBound lower_bound_rate(const NetworkScenario& scenario,
                           std::span<const HoppingProfile> profiles, int user);

// vbar_i / 2 * prod_{k != i} (1 - vbar_k / u).
double asymptotic_multiplexing_gain(std::span<const HoppingProfile> profiles, int u,
                                    int user);

// Rate a user picks from its forward gain, the summed cross gains into its
// receiver and the active-user count, when every user hops over v_star
// sub-bands on average.
double regulated_rate(const NetworkScenario& scenario, int user, int n_active,
                      double v_star);

// Calls visit(prob, d) for every joint placement of the interferers of `user`,
// where d[j] is the interference variance (watts) on sub-band j. Interferers
// with a pmf law contribute one placement per (v, subset) pair. Throws
// std::length_error past kMaxRealizations placements.
void for_each_interference_realization(
    const NetworkScenario& scenario, std::span<const HoppingProfile> profiles, int user,
    const std::function<void(double, std::span<const double>)>& visit);

// Exact densities of the received vector Y (user on its first v_i sub-bands)
// and of the noise-plus-interference vector Z, both of dimension u.
struct ReceivedMixtures {
  GaussianMixtureDiag received;
  GaussianMixtureDiag interference;
};

ReceivedMixtures received_mixtures(const NetworkScenario& scenario,
                                   std::span<const HoppingProfile> profiles, int user);

// h(Y) - h(Z) with both entropies estimated by entropy_mc on independent
// streams; the standard errors add in quadrature.
Estimate mc_mutual_information(const NetworkScenario& scenario,
                               std::span<const HoppingProfile> profiles, int user,
                               std::size_t n_samples, std::uint64_t seed, int threads = 1);

}  // namespace fhs
