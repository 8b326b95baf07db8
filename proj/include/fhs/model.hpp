// Network instance, per-user hopping laws and the exact noise-plus-interference
// spectrum seen on one sub-band at a receiver.

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace fhs {

// Largest user count accepted by exhaustive spectrum enumeration.
inline constexpr int kMaxEnumeratedUsers = 20;

// Relative tolerance under which two variance increments are the same level.
inline constexpr double kLevelMergeTolerance = 1e-9;

class NetworkScenario {
 public:
  // gains[k][i] is the amplitude from transmitter k to receiver i.
  NetworkScenario(int n_subbands, std::vector<std::vector<double>> gains,
                  double total_power, double noise_power);

  int n_users() const noexcept { return static_cast<int>(gains_.size()); }
  int n_subbands() const noexcept { return n_subbands_; }
  double total_power() const noexcept { return total_power_; }
  double noise_power() const noexcept { return noise_power_; }
  double snr() const noexcept { return total_power_ / noise_power_; }

  double gain(int tx, int rx) const { return gains_.at(tx).at(rx); }
  double gain_sq(int tx, int rx) const {
    const double h = gain(tx, rx);
    return h * h;
  }
  const std::vector<std::vector<double>>& gains() const noexcept { return gains_; }

  // Same network with P rescaled so that P / sigma^2 == gamma.
  NetworkScenario with_snr(double gamma) const;

  friend bool operator==(const NetworkScenario&, const NetworkScenario&) = default;

 private:
  int n_subbands_;
  std::vector<std::vector<double>> gains_;
  double total_power_;
  double noise_power_;
};

// How many sub-bands a user occupies per slot: a fixed count, or a law over
// 0..u drawn afresh every slot.
class HoppingProfile {
 public:
  static HoppingProfile fixed(int v);
  // weights[v] = Pr{v sub-bands}, v = 0..u.
  static HoppingProfile pmf(std::vector<double> weights);

  bool is_fixed() const noexcept { return std::holds_alternative<int>(law_); }
  int fixed_v() const;
  const std::vector<double>& weights() const;

  double mean_v() const;
  double prob_v(int v) const;
  // Largest v with nonzero probability.
  int max_v() const;

  // Throws if the law does not live on 0..u.
  void validate(int u) const;

  friend bool operator==(const HoppingProfile&, const HoppingProfile&) = default;

 private:
  explicit HoppingProfile(std::variant<int, std::vector<double>> law)
      : law_(std::move(law)) {}
  std::variant<int, std::vector<double>> law_;
};

struct InterferenceLevel {
  double prob;    // a_l
  double c;       // variance increment in units of P
  double sigma2;  // sigma^2 + c * P
};

class InterferenceSpectrum {
 public:
  InterferenceSpectrum(int receiver, std::vector<InterferenceLevel> levels);

  int receiver() const noexcept { return receiver_; }
  const std::vector<InterferenceLevel>& levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }

  // a_0: probability that the sub-band carries no interference.
  double interference_free_prob() const noexcept { return levels_.front().prob; }
  double max_c() const noexcept { return levels_.back().c; }
  // -sum a_l log2 a_l, in bits.
  double discrete_entropy() const;

 private:
  int receiver_;
  std::vector<InterferenceLevel> levels_;
};

// Checks that profiles match the scenario (count and support).
void validate_profiles(const NetworkScenario& scenario,
                       std::span<const HoppingProfile> profiles);

// Exact mixture over which interferers land on a given sub-band of `receiver`.
// Level 0 (c = 0) is always present, possibly with probability zero.
InterferenceSpectrum enumerate_interference_spectrum(
    const NetworkScenario& scenario, std::span<const HoppingProfile> profiles,
    int receiver);

// prod_{k != receiver} (1 - vbar_k / u).
double prob_interference_free(std::span<const HoppingProfile> profiles, int u,
                              int receiver);

}  // namespace fhs
