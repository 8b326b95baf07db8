#include "fhs/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "fhs/bounds.hpp"
#include "fhs/measures.hpp"
#include "fhs/parallel.hpp"
#include "fhs/random.hpp"
#include "fhs/sim.hpp"

namespace fhs {

namespace {

Cell real_or_null(const std::optional<double>& x) {
  return x ? Cell(*x) : Cell(std::monostate{});
}

Cell integer(std::int64_t x) { return Cell(x); }

ScenarioSpec load_scenario(const RunSpec& spec) {
  if (spec.scenario_path.empty()) throw std::invalid_argument("--scenario is required");
  return scenario_from_json(read_json_file(spec.scenario_path));
}

std::uint64_t require_seed(const RunSpec& spec) {
  if (!spec.seed) throw std::invalid_argument(spec.command + " is randomized and needs --seed");
  return *spec.seed;
}

UserCountPmf load_pmf(const RunSpec& spec) {
  const int given = static_cast<int>(!spec.pmf_path.empty()) +
                    static_cast<int>(spec.poisson_lambda.has_value()) +
                    static_cast<int>(!spec.q.empty());
  if (given != 1)
    throw std::invalid_argument("give exactly one of --pmf, --poisson or --q");
  if (!spec.pmf_path.empty()) return pmf_from_json(read_json_file(spec.pmf_path));
  if (spec.poisson_lambda) return UserCountPmf::poisson(*spec.poisson_lambda);
  return UserCountPmf::finite(spec.q);
}

int require_u(const RunSpec& spec) {
  if (spec.u < 1) throw std::invalid_argument("--u must be >= 1");
  return spec.u;
}

FdConfig fd_config(const RunSpec& spec, const UserCountPmf& pmf, int u) {
  return spec.n_des ? FdConfig::checked(*spec.n_des, u) : FdConfig::defaults(pmf, u);
}

std::vector<int> users_of(const RunSpec& spec, int n_users) {
  if (spec.user) {
    if (*spec.user < 0 || *spec.user >= n_users) throw std::out_of_range("--user out of range");
    return {*spec.user};
  }
  std::vector<int> all(n_users);
  for (int i = 0; i < n_users; ++i) all[i] = i;
  return all;
}

}  // namespace

std::vector<double> default_gamma_ladder() {
  return {1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
}

Table cmd_levels(const RunSpec& spec) {
  const auto sc = load_scenario(spec);
  Table t({"receiver", "level", "a", "c", "sigma2"});
  for (int r : users_of(spec, sc.scenario.n_users())) {
    const auto spectrum = enumerate_interference_spectrum(sc.scenario, sc.profiles, r);
    for (std::size_t l = 0; l < spectrum.size(); ++l) {
      const auto& lv = spectrum.levels()[l];
      t.add_row({integer(r), integer(static_cast<std::int64_t>(l)), lv.prob, lv.c, lv.sigma2});
    }
  }
  return t;
}

Table cmd_bounds(const RunSpec& spec) {
  const auto sc = load_scenario(spec);
  const auto gammas = spec.gammas.empty() ? default_gamma_ladder() : spec.gammas;
  const std::uint64_t seed = spec.mc_samples > 0 ? require_seed(spec) : 0;
  const int u = sc.scenario.n_subbands();
  Table t({"user", "gamma", "r_ub", "r_lb", "mi_mc", "mi_se", "slope"});
  for (int user : users_of(spec, sc.scenario.n_users())) {
    const bool fixed = sc.profiles[user].is_fixed();
    const double slope = asymptotic_multiplexing_gain(sc.profiles, u, user);
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      if (!(gammas[g] > 0.0)) throw std::invalid_argument("gamma values must be positive");
      const auto scenario = sc.scenario.with_snr(gammas[g]);
      std::optional<double> ub;
      std::optional<double> lb;
      if (fixed) {
        ub = upper_bound_rate(scenario, sc.profiles, user,
                              spec.slope_only ? UpperBoundMode::slope_only
                                              : UpperBoundMode::exact)
                 .value_bits;
        lb = lower_bound_rate(scenario, sc.profiles, user).value_bits;
      }
      Cell mi = std::monostate{};
      Cell se = std::monostate{};
      if (spec.mc_samples > 0 && fixed) {
        const auto est = mc_mutual_information(scenario, sc.profiles, user, spec.mc_samples,
                                               derive_seed(seed, user, g), spec.threads);
        mi = est.value;
        se = est.std_error;
      }
      t.add_row({integer(user), gammas[g], real_or_null(ub), real_or_null(lb), mi, se, slope});
    }
  }
  return t;
}

Table cmd_simulate(const RunSpec& spec) {
  const auto sc = load_scenario(spec);
  const std::uint64_t seed = require_seed(spec);
  if (spec.slots < 1) throw std::invalid_argument("--slots must be >= 1");
  SimConfig cfg{sc.scenario, sc.profiles, spec.slots, seed};
  const SimStats stats = run(cfg, spec.threads);
  const int u = sc.scenario.n_subbands();
  const bool exact = sc.scenario.n_users() <= kMaxEnumeratedUsers;

  Table t({"user", "record", "index", "c", "value", "std_error"});
  const Cell none = std::monostate{};
  for (int i = 0; i < sc.scenario.n_users(); ++i) {
    const auto& us = stats.users[i];
    t.add_row({integer(i), std::string("free"), none, none, us.free_mean, us.free_std_error});
    t.add_row({integer(i), std::string("free_expected"), none, none,
               expected_free_subbands(sc.scenario, sc.profiles, i), none});
    for (std::size_t l = 0; l < us.levels.size(); ++l)
      t.add_row({integer(i), std::string("level"), integer(static_cast<std::int64_t>(l)),
                 us.levels[l].c, us.levels[l].freq, us.levels[l].std_error});
    if (exact) {
      const auto spectrum = enumerate_interference_spectrum(sc.scenario, sc.profiles, i);
      for (std::size_t l = 0; l < spectrum.size(); ++l)
        t.add_row({integer(i), std::string("level_exact"),
                   integer(static_cast<std::int64_t>(l)), spectrum.levels()[l].c,
                   spectrum.levels()[l].prob, none});
    }
    const double n = static_cast<double>(stats.n_slots);
    for (int j = 0; j < u; ++j) {
      const double p = us.occupancy[j];
      t.add_row({integer(i), std::string("occupancy"), integer(j), none, p,
                 std::sqrt(p * (1.0 - p) / n)});
    }
  }

  if (!spec.dump_path.empty()) {
    const auto samples = sample_received(cfg, spec.dump_user, spec.dump_samples,
                                         derive_seed(seed, 0xD0), spec.threads);
    write_samples(spec.dump_path, samples);
  }
  return t;
}

Table cmd_measures(const RunSpec& spec) {
  const auto pmf = load_pmf(spec);
  const int u = require_u(spec);
  const double ud = u;
  Table t({"scheme", "measure", "u", "value", "value_over_u", "argmax_name", "argmax"});
  const Cell none = std::monostate{};
  auto emit = [&](const MeasureReport& r) {
    const std::string s = to_string(r.scheme);
    auto arg = [&](const std::optional<double>& x, const char* name) -> std::pair<Cell, Cell> {
      if (!x) return {none, none};
      return {std::string(name), *x};
    };
    const auto a1 = arg(r.v_star, "v_star");
    const auto a2 = arg(r.v_dagger, "v_dagger");
    const auto a4 = arg(r.v_service, "v_service");
    const std::pair<Cell, Cell> fd =
        r.n_des ? std::pair<Cell, Cell>{std::string("n_des"), integer(*r.n_des)}
                : std::pair<Cell, Cell>{none, none};
    const bool is_fd = r.scheme == Scheme::fd;
    t.add_row({s, std::string("eta1"), integer(u), r.eta1, r.eta1 / ud,
               is_fd ? fd.first : a1.first, is_fd ? fd.second : a1.second});
    t.add_row({s, std::string("eta2"), integer(u), r.eta2, r.eta2 / ud,
               is_fd ? fd.first : a2.first, is_fd ? fd.second : a2.second});
    t.add_row({s, std::string("eta3"), integer(u), r.eta3, r.eta3 / ud,
               is_fd ? fd.first : none, is_fd ? fd.second : none});
    t.add_row({s, std::string("eta4"), integer(u), r.eta4, none,
               is_fd ? fd.first : a4.first, is_fd ? fd.second : a4.second});
  };
  emit(report_fh(pmf, ud, spec.full_service));
  emit(report_fd(pmf, fd_config(spec, pmf, u), ud));
  emit(report_afh(pmf, ud));
  return t;
}

Table cmd_sweep(const RunSpec& spec) {
  struct Point {
    std::string source;
    std::optional<UserCountPmf> pmf;
    int u;
  };
  const std::vector<int> us = spec.us.empty() ? std::vector<int>{require_u(spec)} : spec.us;
  std::vector<Point> points;
  if (!spec.lambdas.empty() == !spec.pmf_paths.empty())
    throw std::invalid_argument("sweep needs exactly one of --lambdas or --pmfs");
  for (int u : us) {
    if (u < 1) throw std::invalid_argument("u values must be >= 1");
    for (double lambda : spec.lambdas)
      points.push_back({"poisson", UserCountPmf::poisson(lambda), u});
    for (const auto& path : spec.pmf_paths)
      points.push_back({path, pmf_from_json(read_json_file(path)), u});
  }

  struct Result {
    double eta1_fh, eta1_fd, eta1_afh, eta2_fh, eta2_fd, eta2_afh, eta4_fd, v_star, v_dagger;
    int n_des;
  };
  std::vector<Result> results(points.size());
  parallel_for(points.size(), spec.threads, [&](std::size_t k) {
    const auto& p = points[k];
    const double ud = p.u;
    const auto fd = fd_config(spec, *p.pmf, p.u);
    const Maximum m1 = eta1_fh(*p.pmf, ud);
    const Maximum m2 = eta2_fh(*p.pmf, ud);
    results[k] = {m1.value,
                  eta1_fd(*p.pmf, fd.n_des, ud),
                  eta_afh(1, *p.pmf, ud),
                  m2.value,
                  eta2_fd(*p.pmf, fd.n_des, ud),
                  eta_afh(2, *p.pmf, ud),
                  eta4_fd(*p.pmf, fd.n_des),
                  m1.argmax,
                  m2.argmax,
                  fd.n_des};
  });

  Table t({"source", "lambda", "u", "n_des", "eta1_fh", "eta1_fd", "eta1_afh", "eta2_fh",
           "eta2_fd", "eta2_afh", "eta4_fd", "v_star", "v_dagger", "eta1_fh_over_u",
           "eta1_fd_over_u", "eta1_afh_over_u", "eta2_fh_over_u", "eta2_fd_over_u",
           "eta2_afh_over_u"});
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    const auto& r = results[k];
    const double ud = p.u;
    t.add_row({p.source, p.pmf->mean(), integer(p.u), integer(r.n_des), r.eta1_fh, r.eta1_fd,
               r.eta1_afh, r.eta2_fh, r.eta2_fd, r.eta2_afh, r.eta4_fd, r.v_star, r.v_dagger,
               r.eta1_fh / ud, r.eta1_fd / ud, r.eta1_afh / ud, r.eta2_fh / ud,
               r.eta2_fd / ud, r.eta2_afh / ud});
  }
  return t;
}

Table cmd_compare(const RunSpec& spec) {
  const auto pmf = load_pmf(spec);
  const int u = require_u(spec);
  const double ud = u;
  const auto fd = fd_config(spec, pmf, u);
  const auto fh = report_fh(pmf, ud, spec.full_service);
  const auto fdr = report_fd(pmf, fd, ud);
  const Cell none = std::monostate{};

  Table t({"row", "fh_value", "fd_value", "winner", "condition", "condition_lhs",
           "condition_rhs"});
  auto winner = [](double a, double b) -> Cell {
    if (a > b) return std::string("FH");
    if (b > a) return std::string("FD");
    return std::string("tie");
  };
  t.add_row({std::string("eta1"), fh.eta1, fdr.eta1, winner(fh.eta1, fdr.eta1), none, none, none});
  t.add_row({std::string("eta2"), fh.eta2, fdr.eta2, winner(fh.eta2, fdr.eta2), none, none, none});
  t.add_row({std::string("eta3"), fh.eta3, fdr.eta3, winner(fh.eta3, fdr.eta3), none, none, none});
  t.add_row({std::string("eta4"), fh.eta4, fdr.eta4, winner(fh.eta4, fdr.eta4), none, none, none});

  const double eps = spec.eps.value_or(default_backoff(ud));
  const auto b = epsilon_backoff_region(pmf, ud, eps);
  t.add_row({std::string("backoff_eta1"), b.fh_eta1, b.fd_eta1, winner(b.fh_eta1, b.fd_eta1),
             b.eta1_q1_threshold ? Cell(pmf.prob(1) > *b.eta1_q1_threshold) : none,
             b.eta1_q1_threshold ? Cell(pmf.prob(1)) : none, real_or_null(b.eta1_q1_threshold)});
  t.add_row({std::string("backoff_eta2"), b.fh_eta2, b.fd_eta2, winner(b.fh_eta2, b.fd_eta2),
             b.eta2_q2_threshold ? Cell(pmf.prob(2) < *b.eta2_q2_threshold) : none,
             b.eta2_q2_threshold ? Cell(pmf.prob(2)) : none, real_or_null(b.eta2_q2_threshold)});

  if (!pmf.is_poisson()) {
    const int n_max = std::max(1, pmf.n_max());
    const auto p1 = proposition1_check(pmf, n_max);
    const auto p2 = proposition2_check(pmf, n_max);
    t.add_row({std::string("proposition_eta1"), p1.fh_value, p1.fd_value,
               winner(p1.fh_value, p1.fd_value), p1.condition, p1.condition_lhs,
               p1.condition_rhs});
    t.add_row({std::string("proposition_eta2"), p2.fh_value, p2.fd_value,
               winner(p2.fh_value, p2.fd_value), p2.condition, p2.condition_lhs,
               p2.condition_rhs});
  }
  return t;
}

Table run_command(const RunSpec& spec) {
  if (spec.command == "levels") return cmd_levels(spec);
  if (spec.command == "bounds") return cmd_bounds(spec);
  if (spec.command == "simulate") return cmd_simulate(spec);
  if (spec.command == "measures") return cmd_measures(spec);
  if (spec.command == "sweep") return cmd_sweep(spec);
  if (spec.command == "compare") return cmd_compare(spec);
  throw std::invalid_argument("unknown command \"" + spec.command + "\"");
}

namespace {

void write_error(std::ostream& err, const std::string& command, const std::string& kind,
                 const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"command", command}, {"type", kind}, {"message", message}};
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-hopping spectrum sharing: spectra, rate bounds, simulation and "
               "user-count measures"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string format = "csv";
  std::uint64_t seed = 0;
  int user = -1;
  int n_des = 0;
  double lambda = 0.0;
  double eps = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-o,--output", spec.output_path, "Output file (default stdout)");
    sub->add_option("--threads", spec.threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto scenario = [&](CLI::App* sub) {
    sub->add_option("--scenario", spec.scenario_path, "Scenario JSON file")->required();
  };
  auto pmf = [&](CLI::App* sub) {
    sub->add_option("--pmf", spec.pmf_path, "User-count pmf JSON file");
    sub->add_option("--poisson", lambda, "Poisson user count with this mean");
    sub->add_option("--q", spec.q, "Finite pmf q_0,q_1,...")->delimiter(',');
    sub->add_option("--u", spec.u, "Number of sub-bands")->required();
    sub->add_option("--n-des", n_des, "FD design user count (must divide u)");
    sub->add_flag("--full-service", spec.full_service,
                  "Back off from v = u so every user is served");
  };

  auto* levels = app.add_subcommand("levels", "Interference spectrum at each receiver");
  scenario(levels);
  levels->add_option("--receiver", user, "Only this receiver");
  common(levels);

  auto* bounds = app.add_subcommand("bounds", "Rate bounds and Monte-Carlo mutual information");
  scenario(bounds);
  bounds->add_option("--user", user, "Only this user");
  bounds->add_option("--gamma", spec.gammas, "SNR values (default 1e2..1e8)")->delimiter(',');
  bounds->add_option("--mc", spec.mc_samples, "Monte-Carlo samples per entropy (0: skip)");
  bounds->add_flag("--slope-only", spec.slope_only, "Skip the exact upper-bound enumeration");
  bounds->add_option("--seed", seed, "Master seed");
  common(bounds);

  auto* simulate = app.add_subcommand("simulate", "Slot simulation of the hopping network");
  scenario(simulate);
  simulate->add_option("--slots", spec.slots, "Number of slots")->required();
  simulate->add_option("--seed", seed, "Master seed")->required();
  simulate->add_option("--dump", spec.dump_path, "Write received samples to this file");
  simulate->add_option("--dump-user", spec.dump_user, "User whose samples are dumped");
  simulate->add_option("--dump-samples", spec.dump_samples, "Number of dumped samples");
  common(simulate);

  auto* measures = app.add_subcommand("measures", "eta1..eta4 for FH, FD and AFH");
  pmf(measures);
  common(measures);

  auto* sweep = app.add_subcommand("sweep", "Measures over a grid of user-count laws");
  sweep->add_option("--u", spec.us, "Sub-band counts")->delimiter(',')->required();
  sweep->add_option("--lambdas", spec.lambdas, "Poisson means")->delimiter(',');
  sweep->add_option("--pmfs", spec.pmf_paths, "User-count pmf JSON files")->delimiter(',');
  sweep->add_option("--n-des", n_des, "FD design user count (must divide u)");
  common(sweep);

  auto* compare = app.add_subcommand("compare", "FH against FD per measure");
  pmf(compare);
  compare->add_option("--eps", eps, "Backoff from v = u (default 1e-3 u)");
  common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    write_error(err, "", "usage", e.what());
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  spec.command = chosen->get_name();
  try {
    spec.format = parse_format(format);
    auto given = [&](const char* name) {
      return chosen->get_option_no_throw(name) != nullptr && chosen->count(name) > 0;
    };
    if (given("--seed")) spec.seed = seed;
    if (given("--receiver") || given("--user")) spec.user = user;
    if (given("--n-des")) spec.n_des = n_des;
    if (given("--poisson")) spec.poisson_lambda = lambda;
    if (given("--eps")) spec.eps = eps;

    const Table table = run_command(spec);
    if (spec.output_path.empty()) {
      table.write(out, spec.format);
    } else {
      std::ofstream file(spec.output_path);
      if (!file) throw std::runtime_error("cannot open " + spec.output_path);
      table.write(file, spec.format);
      if (!file) throw std::runtime_error("failed writing " + spec.output_path);
    }
  } catch (const std::invalid_argument& e) {
    write_error(err, spec.command, "invalid_argument", e.what());
    return 1;
  } catch (const std::length_error& e) {
    write_error(err, spec.command, "too_large", e.what());
    return 1;
  } catch (const std::exception& e) {
    write_error(err, spec.command, "runtime", e.what());
    return 1;
  }
  return 0;
}

}  // namespace fhs
