#include "fhs/sim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

#include "fhs/gains.hpp"
#include "fhs/parallel.hpp"
#include "fhs/random.hpp"

namespace fhs {

namespace {

constexpr std::uint64_t kSlotBlock = 4096;
constexpr std::array<char, 8> kMagic{'F', 'H', 'S', 'S', 'A', 'M', 'P', '1'};

struct LevelTally {
  std::uint64_t sum_x = 0;
  std::uint64_t sum_x2 = 0;
  std::uint64_t sum_xm = 0;
};

struct UserTally {
  std::uint64_t sum_f = 0;
  std::uint64_t sum_f2 = 0;
  std::uint64_t sum_m = 0;
  std::uint64_t sum_m2 = 0;
  std::map<double, LevelTally> levels;
  std::vector<std::uint64_t> occupancy;

  void merge(const UserTally& o) {
    sum_f += o.sum_f;
    sum_f2 += o.sum_f2;
    sum_m += o.sum_m;
    sum_m2 += o.sum_m2;
    for (const auto& [c, t] : o.levels) {
      auto& mine = levels[c];
      mine.sum_x += t.sum_x;
      mine.sum_x2 += t.sum_x2;
      mine.sum_xm += t.sum_xm;
    }
    for (std::size_t j = 0; j < occupancy.size(); ++j) occupancy[j] += o.occupancy[j];
  }
};

void check_config(const SimConfig& cfg) {
  validate_profiles(cfg.scenario, cfg.profiles);
  if (cfg.n_slots < 1) throw std::invalid_argument("n_slots must be >= 1");
}

std::vector<UserTally> simulate_block(const SimConfig& cfg, std::uint64_t begin,
                                      std::uint64_t end) {
  const int n = cfg.scenario.n_users();
  const int u = cfg.scenario.n_subbands();
  std::vector<UserTally> tally(n);
  for (auto& t : tally) t.occupancy.assign(u, 0);

  std::vector<std::vector<int>> sets(n);
  std::vector<std::vector<int>> on_subband(u);
  std::vector<std::pair<double, std::uint64_t>> slot_levels;
  for (std::uint64_t slot = begin; slot < end; ++slot) {
    for (auto& list : on_subband) list.clear();
    for (int i = 0; i < n; ++i) {
      CounterRng rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i), slot));
      sample_hop(cfg.profiles[i], u, rng, sets[i]);
      for (int j : sets[i]) on_subband[j].push_back(i);
    }
    for (int i = 0; i < n; ++i) {
      auto& t = tally[i];
      const std::uint64_t m = sets[i].size();
      std::uint64_t free = 0;
      slot_levels.clear();
      for (int j : sets[i]) {
        ++t.occupancy[j];
        double c = 0.0;
        for (int k : on_subband[j])
          if (k != i) c += cfg.scenario.gain_sq(k, i) / static_cast<double>(sets[k].size());
        if (c == 0.0) ++free;
        auto it = std::find_if(slot_levels.begin(), slot_levels.end(),
                               [c](const auto& p) { return p.first == c; });
        if (it == slot_levels.end())
          slot_levels.emplace_back(c, 1);
        else
          ++it->second;
      }
      t.sum_f += free;
      t.sum_f2 += free * free;
      t.sum_m += m;
      t.sum_m2 += m * m;
      for (const auto& [c, x] : slot_levels) {
        auto& lt = t.levels[c];
        lt.sum_x += x;
        lt.sum_x2 += x * x;
        lt.sum_xm += x * m;
      }
    }
  }
  return tally;
}

UserSimStats finish(const UserTally& t, std::uint64_t n_slots) {
  UserSimStats s;
  const double n = static_cast<double>(n_slots);
  s.free_mean = static_cast<double>(t.sum_f) / n;
  if (n_slots > 1) {
    const double var =
        (static_cast<double>(t.sum_f2) - n * s.free_mean * s.free_mean) / (n - 1.0);
    s.free_std_error = std::sqrt(std::max(0.0, var) / n);
  }
  s.occupied_total = t.sum_m;
  s.occupancy.reserve(t.occupancy.size());
  for (auto c : t.occupancy) s.occupancy.push_back(static_cast<double>(c) / n);
  if (t.sum_m == 0) return s;

  // Collapse keys that differ only by rounding, as the exact spectrum does.
  std::vector<std::pair<double, LevelTally>> merged;
  for (const auto& [c, lt] : t.levels) {
    if (!merged.empty() && merged.back().first != 0.0 &&
        c - merged.back().first <= kLevelMergeTolerance * c) {
      auto& m = merged.back().second;
      m.sum_x += lt.sum_x;
      m.sum_x2 += lt.sum_x2;
      m.sum_xm += lt.sum_xm;
    } else {
      merged.emplace_back(c, lt);
    }
  }
  const double total_m = static_cast<double>(t.sum_m);
  for (const auto& [c, lt] : merged) {
    LevelFrequency f;
    f.c = c;
    f.count = lt.sum_x;
    f.freq = static_cast<double>(lt.sum_x) / total_m;
    // Ratio-estimator variance: sum_s (x_s - p m_s)^2 / (sum_s m_s)^2.
    const double resid = static_cast<double>(lt.sum_x2) -
                         2.0 * f.freq * static_cast<double>(lt.sum_xm) +
                         f.freq * f.freq * static_cast<double>(t.sum_m2);
    f.std_error = std::sqrt(std::max(0.0, resid)) / total_m;
    s.levels.push_back(f);
  }
  return s;
}

void put_u64(std::ostream& out, std::uint64_t x) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("sample file truncated");
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return x;
}

}  // namespace

SimStats run(const SimConfig& cfg, int threads) {
  check_config(cfg);
  const std::uint64_t n_blocks = (cfg.n_slots + kSlotBlock - 1) / kSlotBlock;
  std::vector<std::vector<UserTally>> blocks(n_blocks);
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    const std::uint64_t begin = b * kSlotBlock;
    blocks[b] = simulate_block(cfg, begin, std::min(cfg.n_slots, begin + kSlotBlock));
  });

  std::vector<UserTally> total = std::move(blocks.front());
  for (std::size_t b = 1; b < blocks.size(); ++b)
    for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(blocks[b][i]);

  SimStats stats;
  stats.n_slots = cfg.n_slots;
  for (const auto& t : total) stats.users.push_back(finish(t, cfg.n_slots));
  return stats;
}

SampleMatrix sample_received(const SimConfig& cfg, int user, std::uint64_t n_samples,
                             std::uint64_t seed, int threads) {
  validate_profiles(cfg.scenario, cfg.profiles);
  const auto& sc = cfg.scenario;
  if (user < 0 || user >= sc.n_users()) throw std::out_of_range("user index");
  if (!cfg.profiles[user].is_fixed())
    throw std::invalid_argument("sample_received needs a fixed hop count for the user");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const int u = sc.n_subbands();
  const int v = cfg.profiles[user].fixed_v();
  const double power = sc.total_power();
  const double noise_sd = std::sqrt(sc.noise_power());
  const double own_sd = v > 0 ? sc.gain(user, user) * std::sqrt(power / v) : 0.0;

  SampleMatrix out;
  out.n_subbands = static_cast<std::uint64_t>(u);
  out.n_samples = n_samples;
  out.data.assign(n_samples * out.n_cols(), 0.0);

  const std::uint64_t n_blocks = (n_samples + kSlotBlock - 1) / kSlotBlock;
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    std::vector<int> set;
    const std::uint64_t begin = b * kSlotBlock;
    const std::uint64_t end = std::min(n_samples, begin + kSlotBlock);
    for (std::uint64_t s = begin; s < end; ++s) {
      CounterRng rng(derive_seed(seed, s));
      std::normal_distribution<double> normal(0.0, 1.0);
      double* row = &out.data[s * out.n_cols()];
      double* z = row + u;
      for (int k = 0; k < sc.n_users(); ++k) {
        if (k == user) continue;
        sample_hop(cfg.profiles[k], u, rng, set);
        if (set.empty()) continue;
        const double sd = sc.gain(k, user) * std::sqrt(power / static_cast<double>(set.size()));
        for (int j : set) z[j] += sd * normal(rng);
      }
      for (int j = 0; j < u; ++j) z[j] += noise_sd * normal(rng);
      for (int j = 0; j < u; ++j) row[j] = z[j] + (j < v ? own_sd * normal(rng) : 0.0);
    }
  });
  return out;
}

void write_samples(const std::filesystem::path& path, const SampleMatrix& m) {
  if (m.data.size() != m.n_samples * m.n_cols())
    throw std::invalid_argument("sample matrix size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, m.n_subbands);
  put_u64(out, m.n_samples);
  put_u64(out, m.n_cols());
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  } else {
    for (double x : m.data) put_u64(out, std::bit_cast<std::uint64_t>(x));
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

SampleMatrix read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error(path.string() + " is not a sample file");
  SampleMatrix m;
  m.n_subbands = get_u64(in);
  m.n_samples = get_u64(in);
  if (get_u64(in) != m.n_cols()) throw std::runtime_error("sample file column count mismatch");
  m.data.resize(m.n_samples * m.n_cols());
  for (auto& x : m.data) x = std::bit_cast<double>(get_u64(in));
  return m;
}

}  // namespace fhs
