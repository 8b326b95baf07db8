// Performance of hopping (FH), frequency division (FD) and adaptive hopping
// (AFH) when the number of active users N is random.
//
//   eta1  mean sum multiplexing gain
//   eta2  mean of the per-user gain, counted only when every user is served
//   eta3  smallest nonzero per-user gain at N = n_max
//   eta4  mean fraction of active users that are served
//
// The u argument is kept real: every measure except eta4 is linear in u.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fhs/optimize.hpp"

namespace fhs {

// Tail mass below which Poisson sums are cut.
inline constexpr double kPoissonTail = 1e-12;

class UserCountPmf {
 public:
  // q[n] = Pr{N = n}, n = 0..n_max.
  static UserCountPmf finite(std::vector<double> q);
  // Truncated at the first n >= 20 lambda with Pr{N > n} < kPoissonTail.
  static UserCountPmf poisson(double lambda);

  bool is_poisson() const noexcept { return lambda_.has_value(); }
  double lambda() const;
  const std::vector<double>& q() const noexcept { return q_; }
  int n_max() const noexcept { return static_cast<int>(q_.size()) - 1; }
  double prob(int n) const noexcept {
    return n >= 0 && n <= n_max() ? q_[static_cast<std::size_t>(n)] : 0.0;
  }
  double mean() const;

 private:
  UserCountPmf(std::vector<double> q, std::optional<double> lambda)
      : q_(std::move(q)), lambda_(lambda) {}
  std::vector<double> q_;
  std::optional<double> lambda_;
};

struct FdConfig {
  int n_des = 1;

  // min(n_max, u); u for a Poisson law.
  static FdConfig defaults(const UserCountPmf& pmf, int u);
  // Explicit design target; u must be a multiple of it.
  static FdConfig checked(int n_des, int u);
};

enum class Scheme { fh, fd, afh };
std::string to_string(Scheme s);

// (n / 2)(u / n_des) for n <= n_des, else u / 2.
double fd_smg(int n_des, int n, double u);
int fd_n_served(int n_des, int n);
// Everyone is served unless all of them occupy every sub-band.
int fh_n_served(double v, int n, double u);

// Robust hop count v* maximizing E{smg_fair(v, N, u)}. Poisson laws use the
// closed form v* = min(u / lambda, u); other laws the grid-refine optimizer.
Maximum eta1_fh(const UserCountPmf& pmf, double u);
double eta1_fd(const UserCountPmf& pmf, int n_des, double u);

// E{smg_fair(v, N, u) / N * 1(all N served)} at a fixed v.
double eta2_fh_objective(const UserCountPmf& pmf, double v, double u);
// Robust hop count v-dagger maximizing eta2_fh_objective.
Maximum eta2_fh(const UserCountPmf& pmf, double u);
// (u / (2 n_des)) Pr{1 <= N <= n_des}.
double eta2_fd(const UserCountPmf& pmf, int n_des, double u);

struct PoissonEta2 {
  double omega = 0.0;     // 1 - v / u
  double v_dagger = 0.0;
  double value = 0.0;
};

// Closed form of eta2_fh for Poisson(lambda) users: omega solves
// exp(-lambda omega) = 1 - lambda omega + lambda omega^2 on (0, 1). For
// lambda <= 2 there is no interior root and v = u (omega = 0) is optimal.
PoissonEta2 eta2_fh_poisson_closed(double lambda, double u);

// FD: u / (2 n_max). FH: all n_max users hop over v sub-bands (default
// u / n_max), giving (v / 2)(1 - v / u)^(n_max - 1).
double eta3(Scheme scheme, int n_max, double u, std::optional<double> v = std::nullopt);
// eta3(FH) / eta3(FD) at the default v: (1 - 1/n_max)^(n_max - 1).
double eta3_ratio(int n_max);

// Expected served fraction; a draw with N = 0 counts as fully served.
double eta4_fh(const UserCountPmf& pmf, double v, double u);
double eta4_fd(const UserCountPmf& pmf, int n_des);

// Hopping at v = u - eps against FD with n_des = min(n_max, u).
struct BackoffRegion {
  double eps = 0.0;
  double fh_eta1 = 0.0;
  double fd_eta1 = 0.0;
  double fh_eta2 = 0.0;
  double fd_eta2 = 0.0;
  bool fh_wins_eta1 = false;
  bool fh_wins_eta2 = false;
  // Only for n_max = 2 with q_0 = 0:
  // eta1: FH wins iff q_1 > eta1_q2_multiplier * q_2, i.e. q_1 > eta1_q1_threshold.
  std::optional<double> eta1_q2_multiplier;
  std::optional<double> eta1_q1_threshold;
  // eta2: FH wins iff q_2 < eta2_q2_threshold.
  std::optional<double> eta2_q2_threshold;
};

// Requires 0 < eps < u / 2.
BackoffRegion epsilon_backoff_region(const UserCountPmf& pmf, double u, double eps);
inline double default_backoff(double u) { return 1e-3 * u; }

// Hop count re-tuned to u / N once N is known.
// measure 1: (u/2) sum q_n (1 - 1/n)^(n-1); measure 2 adds a 1/n factor.
double eta_afh(int measure, const UserCountPmf& pmf, double u);

struct PropositionCheck {
  bool condition = false;   // the sufficient condition on E{N}
  bool fh_beats_fd = false; // direct comparison of the measures
  double mean_users = 0.0;
  double condition_lhs = 0.0;
  double condition_rhs = 0.0;
  double fh_value = 0.0;
  double fd_value = 0.0;
};

// eta1: E{N} < ln((e^2 - 1) n_max) / 2 implies eta1_fh > eta1_fd.
PropositionCheck proposition1_check(const UserCountPmf& pmf, int n_max);
// eta2: (1/E{N})(1 - 1/E{N})^(E{N} - 1) > 1/n_max implies eta2_fh > eta2_fd.
PropositionCheck proposition2_check(const UserCountPmf& pmf, int n_max);

struct MeasureReport {
  Scheme scheme = Scheme::fh;
  double u = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  double eta4 = 0.0;
  std::optional<double> v_star;     // eta1 argmax (FH)
  std::optional<double> v_dagger;   // eta2 argmax (FH)
  std::optional<double> v_service;  // hop count used for eta4 (FH)
  std::optional<int> n_des;         // FD
};

// With full_service set and v* = u, eta4 is taken at v* - default_backoff(u).
MeasureReport report_fh(const UserCountPmf& pmf, double u, bool full_service = false);
MeasureReport report_fd(const UserCountPmf& pmf, const FdConfig& fd, double u);
MeasureReport report_afh(const UserCountPmf& pmf, double u);

}  // namespace fhs
