// Command-line front end: subcommands that turn a JSON scenario or a user-count
// law into a table.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fhs/io.hpp"

namespace fhs {

struct RunSpec {
  std::string command;
  Format format = Format::csv;
  std::string output_path;  // empty: stdout
  std::optional<std::uint64_t> seed;
  int threads = 1;

  // levels, bounds, simulate
  std::string scenario_path;
  std::optional<int> user;  // receiver for levels
  std::vector<double> gammas;
  std::uint64_t mc_samples = 0;
  bool slope_only = false;
  std::uint64_t slots = 0;
  std::string dump_path;
  int dump_user = 0;
  std::uint64_t dump_samples = 10000;

  // measures, sweep, compare
  std::string pmf_path;
  std::optional<double> poisson_lambda;
  std::vector<double> q;
  int u = 0;
  std::vector<int> us;
  std::vector<double> lambdas;
  std::vector<std::string> pmf_paths;
  std::optional<int> n_des;
  bool full_service = false;
  std::optional<double> eps;
};

// Decades 1e2 .. 1e8.
std::vector<double> default_gamma_ladder();

Table cmd_levels(const RunSpec& spec);
Table cmd_bounds(const RunSpec& spec);
Table cmd_simulate(const RunSpec& spec);
Table cmd_measures(const RunSpec& spec);
Table cmd_sweep(const RunSpec& spec);
Table cmd_compare(const RunSpec& spec);

Table run_command(const RunSpec& spec);

// Parses argv, runs one subcommand and writes its table. On failure writes
// {"error": {...}} to err and returns nonzero.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fhs
