#include "fhs/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "fhs/random.hpp"

namespace fhs {

namespace {

struct Placement {
  double prob;
  std::vector<int> subbands;
};

// All (v, subset) outcomes of one interferer with their probabilities.
std::vector<Placement> placements_of(const HoppingProfile& prof, int u) {
  std::vector<Placement> out;
  for (int v = 0; v <= u; ++v) {
    const double pv = prof.prob_v(v);
    if (pv <= 0.0) continue;
    std::vector<bool> pick(u, false);
    std::fill(pick.begin(), pick.begin() + v, true);
    std::vector<Placement> subsets;
    do {
      Placement p{0.0, {}};
      for (int j = 0; j < u; ++j)
        if (pick[j]) p.subbands.push_back(j);
      subsets.push_back(std::move(p));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    const double each = pv / static_cast<double>(subsets.size());
    for (auto& s : subsets) {
      s.prob = each;
      out.push_back(std::move(s));
    }
  }
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int require_fixed_user(const HoppingProfile& prof, const char* what) {
  if (!prof.is_fixed())
    throw std::invalid_argument(std::string(what) +
                                " needs a fixed hopping count for the user");
  return prof.fixed_v();
}

void check_user(const NetworkScenario& scenario, std::span<const HoppingProfile> profiles,
                int user) {
  validate_profiles(scenario, profiles);
  if (user < 0 || user >= scenario.n_users()) throw std::out_of_range("user index");
}

}  // namespace

double expected_free_subbands(const NetworkScenario& scenario,
                              std::span<const HoppingProfile> profiles, int user) {
  check_user(scenario, profiles, user);
  return profiles[user].mean_v() *
         prob_interference_free(profiles, scenario.n_subbands(), user);
}

double asymptotic_multiplexing_gain(std::span<const HoppingProfile> profiles, int u,
                                    int user) {
  if (user < 0 || static_cast<std::size_t>(user) >= profiles.size())
    throw std::out_of_range("user index");
  return 0.5 * profiles[user].mean_v() * prob_interference_free(profiles, u, user);
}

void for_each_interference_realization(
    const NetworkScenario& scenario, std::span<const HoppingProfile> profiles, int user,
    const std::function<void(double, std::span<const double>)>& visit) {
  check_user(scenario, profiles, user);
  const int u = scenario.n_subbands();
  const double power = scenario.total_power();

  struct Interferer {
    double gain_sq;
    std::vector<Placement> placements;
  };
  std::vector<Interferer> active;
  double count = 1.0;
  for (int k = 0; k < scenario.n_users(); ++k) {
    if (k == user) continue;
    const double g2 = scenario.gain_sq(k, user);
    if (g2 == 0.0 || profiles[k].max_v() == 0) continue;
    double outcomes = 0.0;
    for (int v = 0; v <= u; ++v)
      if (profiles[k].prob_v(v) > 0.0) outcomes += binomial(u, v);
    count *= outcomes;
    if (count > static_cast<double>(kMaxRealizations))
      throw std::length_error(
          "more than " + std::to_string(kMaxRealizations) +
          " interferer placements; use the slope-only upper bound instead");
    active.push_back({g2, placements_of(profiles[k], u)});
  }

  // d is rebuilt at every leaf so free sub-bands read exactly zero.
  std::vector<double> d(u, 0.0);
  std::vector<const Placement*> chosen(active.size(), nullptr);
  auto recurse = [&](auto&& self, std::size_t depth, double prob) -> void {
    if (depth == active.size()) {
      std::fill(d.begin(), d.end(), 0.0);
      for (std::size_t k = 0; k < active.size(); ++k) {
        const auto& subbands = chosen[k]->subbands;
        if (subbands.empty()) continue;
        const double add =
            active[k].gain_sq * power / static_cast<double>(subbands.size());
        for (int j : subbands) d[j] += add;
      }
      visit(prob, d);
      return;
    }
    for (const auto& pl : active[depth].placements) {
      chosen[depth] = &pl;
      self(self, depth + 1, prob * pl.prob);
    }
  };
  recurse(recurse, 0, 1.0);
}

RateBound upper_bound_rate(const NetworkScenario& scenario,
                           std::span<const HoppingProfile> profiles, int user,
                           UpperBoundMode mode) {
  check_user(scenario, profiles, user);
  const double free = expected_free_subbands(scenario, profiles, user);
  RateBound out;
  out.slope_bits_per_log2snr = 0.5 * free;
  if (mode == UpperBoundMode::slope_only) return out;

  const int v = require_fixed_user(profiles[user], "upper_bound_rate");
  if (v == 0) {
    out.value_bits = 0.0;
    out.residual_bits = 0.0;
    return out;
  }
  const double sigma2 = scenario.noise_power();
  const double signal = scenario.gain_sq(user, user) * scenario.total_power() / v;
  // Sub-band j of the user's first v carries interference variance d[j]. A
  // zero entry belongs to the free-sub-band term; the rest saturate.
  double residual = 0.0;
  for_each_interference_realization(
      scenario, profiles, user, [&](double prob, std::span<const double> d) {
        double r = 0.0;
        for (int j = 0; j < v; ++j)
          if (d[j] > 0.0) r += 0.5 * std::log2(1.0 + signal / (d[j] + sigma2));
        residual += prob * r;
      });
  const double snr_term = std::log2(1.0 + scenario.gain_sq(user, user) * scenario.snr() / v);
  out.residual_bits = residual;
  out.value_bits = out.slope_bits_per_log2snr * snr_term + residual;
  return out;
}

RateBound lower_bound_rate(const NetworkScenario& scenario,
                           std::span<const HoppingProfile> profiles, int user) {
  check_user(scenario, profiles, user);
  const int v = require_fixed_user(profiles[user], "lower_bound_rate");
  RateBound out;
  if (v == 0) {
    out.value_bits = 0.0;
    out.residual_bits = 0.0;
    return out;
  }
  const auto spectrum = enumerate_interference_spectrum(scenario, profiles, user);
  const double a0 = spectrum.interference_free_prob();
  const double c_top = spectrum.max_c();
  const double entropy = spectrum.discrete_entropy();
  const double gamma = scenario.snr();
  const double g2 = scenario.gain_sq(user, user);
  const double vd = static_cast<double>(v);
  const double scale = std::exp2(-2.0 * entropy) * g2 / vd;

  out.slope_bits_per_log2snr = 0.5 * vd * a0;
  out.value_bits =
      0.5 * vd * std::log2(scale * gamma / std::pow(c_top * gamma + 1.0, 1.0 - a0) + 1.0);
  // Same expression with gamma^a0 pulled out of the logarithm.
  out.residual_bits = 0.5 * vd * std::log2(scale / std::pow(c_top + 1.0 / gamma, 1.0 - a0) +
                                           std::pow(gamma, -a0));
  return out;
}

double regulated_rate(const NetworkScenario& scenario, int user, int n_active,
                      double v_star) {
  if (user < 0 || user >= scenario.n_users()) throw std::out_of_range("user index");
  if (n_active < 1) throw std::invalid_argument("n_active must be >= 1");
  const double u = scenario.n_subbands();
  if (!(v_star > 0.0) || v_star > u)
    throw std::invalid_argument("v_star must lie in (0, u]");
  const double gamma = scenario.snr();
  const double p = v_star / u;
  const double others = n_active - 1;
  double cross = 0.0;
  for (int j = 0; j < scenario.n_users(); ++j)
    if (j != user) cross += scenario.gain_sq(j, user);

  const double num = std::pow(p, -2.0 * others * p) *
                     std::pow(1.0 - p, -2.0 * others * (1.0 - p)) *
                     scenario.gain_sq(user, user) * gamma;
  const double den =
      v_star * std::pow(1.0 + cross * gamma / v_star, 1.0 - std::pow(1.0 - p, others));
  return 0.5 * v_star * std::log2(num / den + 1.0);
}

ReceivedMixtures received_mixtures(const NetworkScenario& scenario,
                                   std::span<const HoppingProfile> profiles, int user) {
  check_user(scenario, profiles, user);
  const int v = require_fixed_user(profiles[user], "received_mixtures");
  const double sigma2 = scenario.noise_power();
  const double signal =
      v > 0 ? scenario.gain_sq(user, user) * scenario.total_power() / v : 0.0;

  std::map<std::vector<double>, double> merged;
  for_each_interference_realization(
      scenario, profiles, user, [&](double prob, std::span<const double> d) {
        std::vector<double> var(d.begin(), d.end());
        for (double& x : var) x += sigma2;
        merged[std::move(var)] += prob;
        if (merged.size() > kMaxMixtureComponents)
          throw std::length_error("received mixture exceeds " +
                                  std::to_string(kMaxMixtureComponents) + " components");
      });

  std::vector<DiagComponent> z;
  std::vector<DiagComponent> y;
  z.reserve(merged.size());
  y.reserve(merged.size());
  double total = 0.0;
  for (const auto& [var, prob] : merged) total += prob;
  for (const auto& [var, prob] : merged) {
    z.push_back({prob / total, var});
    std::vector<double> yv = var;
    for (int j = 0; j < v; ++j) yv[j] += signal;
    y.push_back({prob / total, std::move(yv)});
  }
  return {GaussianMixtureDiag(std::move(y)), GaussianMixtureDiag(std::move(z))};
}

Estimate mc_mutual_information(const NetworkScenario& scenario,
                               std::span<const HoppingProfile> profiles, int user,
                               std::size_t n_samples, std::uint64_t seed, int threads) {
  const auto mix = received_mixtures(scenario, profiles, user);
  const Estimate hy = entropy_mc(mix.received, n_samples, derive_seed(seed, 1), threads);
  const Estimate hz = entropy_mc(mix.interference, n_samples, derive_seed(seed, 2), threads);
  return {hy.value - hz.value, std::hypot(hy.std_error, hz.std_error)};
}

}  // namespace fhs
