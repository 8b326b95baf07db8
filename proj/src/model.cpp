#include "fhs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fhs {

namespace {

constexpr double kPmfSumTolerance = 1e-12;
constexpr std::size_t kMaxSpectrumTerms = std::size_t{1} << 24;

struct Outcome {
  double prob;
  double c;
};

}  // namespace

NetworkScenario::NetworkScenario(int n_subbands,
                                 std::vector<std::vector<double>> gains,
                                 double total_power, double noise_power)
    : n_subbands_(n_subbands),
      gains_(std::move(gains)),
      total_power_(total_power),
      noise_power_(noise_power) {
  if (n_subbands_ < 1) throw std::invalid_argument("n_subbands must be >= 1");
  if (gains_.empty()) throw std::invalid_argument("need at least one user");
  const std::size_t n = gains_.size();
  for (const auto& row : gains_) {
    if (row.size() != n)
      throw std::invalid_argument("gain matrix must be N x N, got a row of length " +
                                  std::to_string(row.size()) + " for N = " +
                                  std::to_string(n));
    for (double h : row)
      if (!std::isfinite(h)) throw std::invalid_argument("gains must be finite");
  }
  if (!(total_power_ > 0.0) || !std::isfinite(total_power_))
    throw std::invalid_argument("total power P must be positive");
  if (!(noise_power_ > 0.0) || !std::isfinite(noise_power_))
    throw std::invalid_argument("noise power sigma2 must be positive");
}

NetworkScenario NetworkScenario::with_snr(double gamma) const {
  return NetworkScenario(n_subbands_, gains_, gamma * noise_power_, noise_power_);
}

HoppingProfile HoppingProfile::fixed(int v) {
  if (v < 0) throw std::invalid_argument("hopping parameter v must be >= 0");
  return HoppingProfile(v);
}

HoppingProfile HoppingProfile::pmf(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("empty hopping pmf");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("hopping pmf weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kPmfSumTolerance)
    throw std::invalid_argument("hopping pmf must sum to 1");
  return HoppingProfile(std::move(weights));
}

int HoppingProfile::fixed_v() const {
  if (!is_fixed()) throw std::logic_error("profile is not a fixed hopping count");
  return std::get<int>(law_);
}

const std::vector<double>& HoppingProfile::weights() const {
  if (is_fixed()) throw std::logic_error("profile is not a pmf");
  return std::get<std::vector<double>>(law_);
}

double HoppingProfile::mean_v() const {
  if (is_fixed()) return std::get<int>(law_);
  const auto& w = std::get<std::vector<double>>(law_);
  double m = 0.0;
  for (std::size_t v = 0; v < w.size(); ++v) m += static_cast<double>(v) * w[v];
  return m;
}

double HoppingProfile::prob_v(int v) const {
  if (is_fixed()) return v == std::get<int>(law_) ? 1.0 : 0.0;
  const auto& w = std::get<std::vector<double>>(law_);
  if (v < 0 || static_cast<std::size_t>(v) >= w.size()) return 0.0;
  return w[v];
}

int HoppingProfile::max_v() const {
  if (is_fixed()) return std::get<int>(law_);
  const auto& w = std::get<std::vector<double>>(law_);
  for (std::size_t v = w.size(); v-- > 0;)
    if (w[v] > 0.0) return static_cast<int>(v);
  return 0;
}

void HoppingProfile::validate(int u) const {
  if (is_fixed()) {
    const int v = std::get<int>(law_);
    if (v > u)
      throw std::invalid_argument("hopping parameter v = " + std::to_string(v) +
                                  " exceeds u = " + std::to_string(u));
  } else if (weights().size() != static_cast<std::size_t>(u) + 1) {
    throw std::invalid_argument("hopping pmf must have u + 1 = " +
                                std::to_string(u + 1) + " entries");
  }
}

InterferenceSpectrum::InterferenceSpectrum(int receiver,
                                           std::vector<InterferenceLevel> levels)
    : receiver_(receiver), levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("spectrum needs at least one level");
}

double InterferenceSpectrum::discrete_entropy() const {
  double h = 0.0;
  for (const auto& l : levels_)
    if (l.prob > 0.0) h -= l.prob * std::log2(l.prob);
  return h;
}

void validate_profiles(const NetworkScenario& scenario,
                       std::span<const HoppingProfile> profiles) {
  if (profiles.size() != static_cast<std::size_t>(scenario.n_users()))
    throw std::invalid_argument("expected one hopping profile per user (" +
                                std::to_string(scenario.n_users()) + "), got " +
                                std::to_string(profiles.size()));
  for (const auto& p : profiles) p.validate(scenario.n_subbands());
}

InterferenceSpectrum enumerate_interference_spectrum(
    const NetworkScenario& scenario, std::span<const HoppingProfile> profiles,
    int receiver) {
  validate_profiles(scenario, profiles);
  const int n = scenario.n_users();
  if (receiver < 0 || receiver >= n) throw std::out_of_range("receiver index");
  if (n > kMaxEnumeratedUsers)
    throw std::length_error("exhaustive spectrum enumeration is limited to N <= " +
                            std::to_string(kMaxEnumeratedUsers) + " users");
  const int u = scenario.n_subbands();

  // Per interferer: idle, or occupying this sub-band after drawing v.
  std::vector<std::vector<Outcome>> outcomes;
  std::size_t terms = 1;
  for (int k = 0; k < n; ++k) {
    if (k == receiver) continue;
    const auto& prof = profiles[k];
    std::vector<Outcome> ks;
    const double idle = 1.0 - prof.mean_v() / u;
    if (idle > 0.0) ks.push_back({idle, 0.0});
    const double g2 = scenario.gain_sq(k, receiver);
    for (int v = 1; v <= u; ++v) {
      const double p = prof.prob_v(v) * v / u;
      if (p > 0.0) ks.push_back({p, g2 / v});
    }
    if (ks.size() == 1 && ks.front().c == 0.0) continue;
    terms *= ks.size();
    if (terms > kMaxSpectrumTerms)
      throw std::length_error("interference spectrum has too many joint outcomes");
    outcomes.push_back(std::move(ks));
  }

  std::vector<Outcome> raw;
  raw.reserve(terms);
  auto recurse = [&](auto&& self, std::size_t depth, double prob, double c) -> void {
    if (depth == outcomes.size()) {
      raw.push_back({prob, c});
      return;
    }
    for (const auto& o : outcomes[depth]) self(self, depth + 1, prob * o.prob, c + o.c);
  };
  recurse(recurse, 0, 1.0, 0.0);

  std::sort(raw.begin(), raw.end(),
            [](const Outcome& a, const Outcome& b) { return a.c < b.c; });

  const double sigma2 = scenario.noise_power();
  const double power = scenario.total_power();
  std::vector<InterferenceLevel> levels;
  if (raw.front().c != 0.0) levels.push_back({0.0, 0.0, sigma2});
  std::size_t i = 0;
  while (i < raw.size()) {
    const double head = raw[i].c;
    double prob = 0.0;
    double weighted_c = 0.0;
    std::size_t j = i;
    for (; j < raw.size(); ++j) {
      if (raw[j].c - head > kLevelMergeTolerance * raw[j].c) break;
      prob += raw[j].prob;
      weighted_c += raw[j].prob * raw[j].c;
    }
    const double c = head == 0.0 ? 0.0 : (prob > 0.0 ? weighted_c / prob : head);
    levels.push_back({prob, c, sigma2 + c * power});
    i = j;
  }
  return InterferenceSpectrum(receiver, std::move(levels));
}

double prob_interference_free(std::span<const HoppingProfile> profiles, int u,
                              int receiver) {
  if (u < 1) throw std::invalid_argument("u must be >= 1");
  double a0 = 1.0;
  for (std::size_t k = 0; k < profiles.size(); ++k)
    if (static_cast<int>(k) != receiver) a0 *= 1.0 - profiles[k].mean_v() / u;
  return a0;
}

}  // namespace fhs
