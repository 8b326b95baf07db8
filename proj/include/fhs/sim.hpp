// Slot-level Monte-Carlo of the hopping network.
//
// Each slot, every user draws its sub-band set from its own stream keyed by
// (master seed, user, slot). Tallies are integer counts merged by addition, so
// the statistics are bit-identical for any thread count.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fhs/model.hpp"

namespace fhs {

struct SimConfig {
  NetworkScenario scenario;
  std::vector<HoppingProfile> profiles;
  std::uint64_t n_slots = 1;
  std::uint64_t master_seed = 0;
};

// Empirical share of the user's occupied sub-bands whose interference
// increment (in units of P) equals c.
struct LevelFrequency {
  double c = 0.0;
  double freq = 0.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
};

struct UserSimStats {
  // Per-slot count of the user's sub-bands with no interference.
  double free_mean = 0.0;
  double free_std_error = 0.0;
  std::vector<LevelFrequency> levels;  // ascending c
  // occupancy[j]: fraction of slots in which the user transmits on sub-band j.
  std::vector<double> occupancy;
  std::uint64_t occupied_total = 0;
};

struct SimStats {
  std::uint64_t n_slots = 0;
  std::vector<UserSimStats> users;
};

SimStats run(const SimConfig& cfg, int threads = 1);

// Draws of the received vector Y and the noise-plus-interference vector Z
// of one user with its sub-bands pinned to the first v. Row s holds
// [y_0 .. y_{u-1}, z_0 .. z_{u-1}].
struct SampleMatrix {
  std::uint64_t n_subbands = 0;
  std::uint64_t n_samples = 0;
  std::vector<double> data;

  std::uint64_t n_cols() const noexcept { return 2 * n_subbands; }
  double y(std::uint64_t s, std::uint64_t j) const { return data[s * n_cols() + j]; }
  double z(std::uint64_t s, std::uint64_t j) const {
    return data[s * n_cols() + n_subbands + j];
  }
};

SampleMatrix sample_received(const SimConfig& cfg, int user, std::uint64_t n_samples,
                             std::uint64_t seed, int threads = 1);

// Layout: 8-byte magic "FHSSAMP1", then u, n_samples and n_cols as
// little-endian uint64, then n_samples * n_cols little-endian float64 values
// in row-major order.
void write_samples(const std::filesystem::path& path, const SampleMatrix& m);
SampleMatrix read_samples(const std::filesystem::path& path);

}  // namespace fhs
