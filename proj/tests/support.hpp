// Shared fixtures for the unit tests.

#pragma once

#include <random>
#include <vector>

#include "fhs/model.hpp"

namespace fhs::testing {

inline NetworkScenario unit_gains(int n_users, int u, double power, double sigma2 = 1.0) {
  return NetworkScenario(u, std::vector<std::vector<double>>(n_users, std::vector<double>(n_users, 1.0)),
                         power, sigma2);
}

inline std::vector<HoppingProfile> fixed_all(int n_users, int v) {
  return std::vector<HoppingProfile>(n_users, HoppingProfile::fixed(v));
}

struct RandomInstance {
  NetworkScenario scenario;
  std::vector<HoppingProfile> profiles;
};

// N in [1, max_users], u in [1, max_u], gains in [0.2, 2], fixed v in [1, u].
inline RandomInstance random_instance(std::mt19937_64& rng, int max_users, int max_u,
                                      double power = 100.0) {
  std::uniform_int_distribution<int> pick_n(1, max_users);
  std::uniform_int_distribution<int> pick_u(1, max_u);
  std::uniform_real_distribution<double> pick_gain(0.2, 2.0);
  const int n = pick_n(rng);
  const int u = pick_u(rng);
  std::vector<std::vector<double>> g(n, std::vector<double>(n));
  for (auto& row : g)
    for (double& x : row) x = pick_gain(rng);
  std::uniform_int_distribution<int> pick_v(1, u);
  std::vector<HoppingProfile> profiles;
  for (int i = 0; i < n; ++i) profiles.push_back(HoppingProfile::fixed(pick_v(rng)));
  return {NetworkScenario(u, std::move(g), power, 1.0), std::move(profiles)};
}

}  // namespace fhs::testing
