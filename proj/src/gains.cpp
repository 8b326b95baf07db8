#include "fhs/gains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fhs {

namespace {

__extension__ using Wide = unsigned __int128;

// Uniform integer in [0, n) by the multiply-shift method.
std::uint64_t below(CounterRng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<Wide>(rng()) * n) >> 64);
}

int draw_count(const HoppingProfile& profile, CounterRng& rng) {
  if (profile.is_fixed()) return profile.fixed_v();
  const auto& w = profile.weights();
  const double r = rng.uniform();
  double acc = 0.0;
  int last = 0;
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (w[v] <= 0.0) continue;
    acc += w[v];
    last = static_cast<int>(v);
    if (r < acc) return last;
  }
  return last;
}

}  // namespace

void SmgProfile::validate(double u) const {
  if (vbar.empty()) throw std::invalid_argument("SMG profile needs at least one user");
  for (double v : vbar)
    if (!(v >= 0.0) || v > u)
      throw std::invalid_argument("mean hop counts must lie in [0, u]");
}

double smg(const SmgProfile& profile, double u) {
  profile.validate(u);
  const auto& vb = profile.vbar;
  double total = 0.0;
  for (std::size_t i = 0; i < vb.size(); ++i) {
    double term = 0.5 * vb[i];
    for (std::size_t k = 0; k < vb.size(); ++k)
      if (k != i) term *= 1.0 - vb[k] / u;
    total += term;
  }
  return total;
}

double smg_fair(double v, int n, double u) {
  if (n < 1) return 0.0;
  return 0.5 * n * v * std::pow(1.0 - v / u, n - 1);
}

double v_opt(int n, double u) {
  if (n < 1) throw std::invalid_argument("v_opt needs n >= 1");
  return u / n;
}

HoppingProfile IntegerHopMixture::to_profile(int u) const {
  std::vector<double> w(static_cast<std::size_t>(u) + 1, 0.0);
  w.at(v_floor) += mu;
  w.at(v_ceil) += 1.0 - mu;
  return HoppingProfile::pmf(std::move(w));
}

IntegerHopMixture integer_hop_mixture(double v, int u) {
  if (u < 1) throw std::invalid_argument("u must be >= 1");
  if (!(v >= 0.0) || v > u) throw std::invalid_argument("v must lie in [0, u]");
  const int lo = std::min(static_cast<int>(std::floor(v)), u - 1);
  return {lo, lo + 1, static_cast<double>(lo + 1) - v};
}

void sample_hop(const HoppingProfile& profile, int u, CounterRng& rng,
                std::vector<int>& out) {
  const int v = draw_count(profile, rng);
  out.resize(static_cast<std::size_t>(u));
  std::iota(out.begin(), out.end(), 0);
  for (int j = 0; j < v; ++j) {
    const auto pick = j + static_cast<int>(below(rng, static_cast<std::uint64_t>(u - j)));
    std::swap(out[j], out[pick]);
  }
  out.resize(static_cast<std::size_t>(v));
  std::sort(out.begin(), out.end());
}

std::vector<int> sample_hop(const HoppingProfile& profile, int u, CounterRng& rng) {
  std::vector<int> out;
  sample_hop(profile, u, rng, out);
  return out;
}

double proportional_fair_objective(const SmgProfile& profile, double u,
                                   std::optional<double> gamma) {
  profile.validate(u);
  const auto& vb = profile.vbar;
  double total = 0.0;
  for (std::size_t i = 0; i < vb.size(); ++i) {
    double term = 0.5 * vb[i];
    for (std::size_t k = 0; k < vb.size(); ++k)
      if (k != i) term *= 1.0 - vb[k] / u;
    if (!(term > 0.0)) return -std::numeric_limits<double>::infinity();
    total += std::log2(term);
  }
  if (gamma) {
    if (!(*gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
    total += static_cast<double>(vb.size()) * std::log2(std::log2(*gamma));
  }
  return total;
}

}  // namespace fhs
