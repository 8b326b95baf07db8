#include "fhs/measures.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fhs/gains.hpp"

namespace fhs {

namespace {

constexpr double kPmfSumTolerance = 1e-12;
constexpr int kRootScanPoints = 4096;

void check_u(double u) {
  if (!(u > 0.0) || !std::isfinite(u)) throw std::invalid_argument("u must be positive");
}

void check_n_des(int n_des) {
  if (n_des < 1) throw std::invalid_argument("n_des must be >= 1");
}

double poisson_root_gap(double lambda, double omega) {
  // exp(-lambda omega) - (1 - lambda omega + lambda omega^2)
  return std::expm1(-lambda * omega) + lambda * omega - lambda * omega * omega;
}

}  // namespace

UserCountPmf UserCountPmf::finite(std::vector<double> q) {
  if (q.empty()) throw std::invalid_argument("user-count pmf is empty");
  double sum = 0.0;
  for (double x : q) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("user-count probabilities must be nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kPmfSumTolerance)
    throw std::invalid_argument("user-count pmf must sum to 1");
  while (q.size() > 1 && q.back() == 0.0) q.pop_back();
  return UserCountPmf(std::move(q), std::nullopt);
}

UserCountPmf UserCountPmf::poisson(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("Poisson rate must be positive");
  const int min_n = static_cast<int>(std::ceil(20.0 * lambda));
  std::vector<double> q;
  for (int n = 0;; ++n) {
    q.push_back(std::exp(-lambda + n * std::log(lambda) - std::lgamma(n + 1.0)));
    // Pr{N > n} = P(n + 1, lambda), the regularized lower incomplete gamma.
    if (n >= min_n && boost::math::gamma_p(n + 1.0, lambda) < kPoissonTail) break;
  }
  return UserCountPmf(std::move(q), lambda);
}

double UserCountPmf::lambda() const {
  if (!lambda_) throw std::logic_error("user-count pmf is not Poisson");
  return *lambda_;
}

double UserCountPmf::mean() const {
  if (lambda_) return *lambda_;
  double m = 0.0;
  for (std::size_t n = 0; n < q_.size(); ++n) m += static_cast<double>(n) * q_[n];
  return m;
}

FdConfig FdConfig::defaults(const UserCountPmf& pmf, int u) {
  if (u < 1) throw std::invalid_argument("u must be >= 1");
  // A Poisson law has unbounded support.
  if (pmf.is_poisson()) return {u};
  return {std::max(1, std::min(pmf.n_max(), u))};
}

FdConfig FdConfig::checked(int n_des, int u) {
  check_n_des(n_des);
  if (u < 1 || u % n_des != 0)
    throw std::invalid_argument("u = " + std::to_string(u) +
                                " is not divisible by n_des = " + std::to_string(n_des));
  return {n_des};
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::fh: return "FH";
    case Scheme::fd: return "FD";
    case Scheme::afh: return "AFH";
  }
  return "?";
}

double fd_smg(int n_des, int n, double u) {
  check_n_des(n_des);
  if (n <= 0) return 0.0;
  if (n <= n_des) return 0.5 * n * u / n_des;
  return 0.5 * u;
}

int fd_n_served(int n_des, int n) { return std::max(0, std::min(n, n_des)); }

int fh_n_served(double v, int n, double u) {
  if (n <= 0) return 0;
  return (n == 1 || v < u) ? n : 0;
}

Maximum eta1_fh(const UserCountPmf& pmf, double u) {
  check_u(u);
  if (pmf.is_poisson()) {
    // E{smg_fair(v, N, u)} = (lambda v / 2) exp(-lambda v / u), peak at u / lambda.
    const double lambda = pmf.lambda();
    const double v = lambda >= 1.0 ? u / lambda : u;
    return {v, 0.5 * lambda * v * std::exp(-lambda * v / u)};
  }
  const auto& q = pmf.q();
  auto objective = [&](double v) {
    double s = 0.0;
    for (int n = 1; n <= pmf.n_max(); ++n)
      if (q[n] > 0.0) s += q[n] * smg_fair(v, n, u);
    return s;
  };
  return maximize_on_interval(objective, 0.0, u);
}

double eta1_fd(const UserCountPmf& pmf, int n_des, double u) {
  check_u(u);
  double s = 0.0;
  for (int n = 1; n <= pmf.n_max(); ++n) s += pmf.prob(n) * fd_smg(n_des, n, u);
  return s;
}

double eta2_fh_objective(const UserCountPmf& pmf, double v, double u) {
  // At v = u only a lone user is served.
  if (v >= u) return 0.5 * pmf.prob(1) * u;
  double s = 0.0;
  for (int n = 1; n <= pmf.n_max(); ++n) {
    const double qn = pmf.prob(n);
    if (qn > 0.0) s += qn * 0.5 * v * std::pow(1.0 - v / u, n - 1);
  }
  return s;
}

Maximum eta2_fh(const UserCountPmf& pmf, double u) {
  check_u(u);
  return maximize_on_interval([&](double v) { return eta2_fh_objective(pmf, v, u); }, 0.0,
                              u);
}

double eta2_fd(const UserCountPmf& pmf, int n_des, double u) {
  check_u(u);
  check_n_des(n_des);
  double served = 0.0;
  for (int n = 1; n <= std::min(n_des, pmf.n_max()); ++n) served += pmf.prob(n);
  return 0.5 * u / n_des * served;
}

PoissonEta2 eta2_fh_poisson_closed(double lambda, double u) {
  check_u(u);
  if (!(lambda > 0.0)) throw std::invalid_argument("Poisson rate must be positive");
  const double lone = 0.5 * u * lambda * std::exp(-lambda);
  if (lambda <= 2.0) return {0.0, u, lone};

  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  double prev = 1.0 / kRootScanPoints;
  bool prev_positive = poisson_root_gap(lambda, prev) > 0.0;
  for (int k = 2; k <= kRootScanPoints; ++k) {
    const double w = static_cast<double>(k) / kRootScanPoints;
    const bool positive = poisson_root_gap(lambda, w) > 0.0;
    if (prev_positive && !positive) {
      lo = prev;
      hi = w;
      found = true;
      break;
    }
    prev = w;
    prev_positive = positive;
  }
  if (!found) return {0.0, u, lone};
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (poisson_root_gap(lambda, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double w = 0.5 * (lo + hi);
  const double value = std::exp(-lambda) * (1.0 - w) * std::expm1(lambda * w) * u / (2.0 * w);
  return {w, (1.0 - w) * u, value};
}

double eta3(Scheme scheme, int n_max, double u, std::optional<double> v) {
  check_u(u);
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (scheme == Scheme::fd) return 0.5 * u / n_max;
  const double hop = v.value_or(u / n_max);
  if (!(hop > 0.0) || hop > u) throw std::invalid_argument("v must lie in (0, u]");
  if (hop >= u && n_max > 1) return 0.0;
  return 0.5 * hop * std::pow(1.0 - hop / u, n_max - 1);
}

double eta3_ratio(int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  return std::pow(1.0 - 1.0 / n_max, n_max - 1);
}

double eta4_fh(const UserCountPmf& pmf, double v, double u) {
  check_u(u);
  double loss = 0.0;
  for (int n = 1; n <= pmf.n_max(); ++n) {
    const int served = fh_n_served(v, n, u);
    if (served < n) loss += pmf.prob(n) * (1.0 - static_cast<double>(served) / n);
  }
  return 1.0 - loss;
}

double eta4_fd(const UserCountPmf& pmf, int n_des) {
  check_n_des(n_des);
  double loss = 0.0;
  for (int n = n_des + 1; n <= pmf.n_max(); ++n)
    loss += pmf.prob(n) * (1.0 - static_cast<double>(n_des) / n);
  return 1.0 - loss;
}

BackoffRegion epsilon_backoff_region(const UserCountPmf& pmf, double u, double eps) {
  check_u(u);
  if (!(eps > 0.0) || !(eps < 0.5 * u))
    throw std::invalid_argument("backoff eps must lie in (0, u/2)");
  BackoffRegion r;
  r.eps = eps;
  const double v = u - eps;
  const int n_des = std::max(1, std::min(pmf.n_max(), static_cast<int>(std::floor(u))));
  double fh1 = 0.0;
  for (int n = 1; n <= pmf.n_max(); ++n) fh1 += pmf.prob(n) * smg_fair(v, n, u);
  r.fh_eta1 = fh1;
  r.fd_eta1 = eta1_fd(pmf, n_des, u);
  r.fh_eta2 = eta2_fh_objective(pmf, v, u);
  r.fd_eta2 = eta2_fd(pmf, n_des, u);
  r.fh_wins_eta1 = r.fh_eta1 > r.fd_eta1;
  r.fh_wins_eta2 = r.fh_eta2 > r.fd_eta2;

  if (pmf.n_max() <= 2 && pmf.prob(0) == 0.0) {
    const double e = eps / u;
    const double s = 1.0 - e;
    const double mult = 2.0 * (1.0 - 2.0 * e * (1.0 - e)) / (1.0 - 2.0 * e);
    r.eta1_q2_multiplier = mult;
    r.eta1_q1_threshold = mult / (1.0 + mult);
    r.eta2_q2_threshold = (2.0 * s - 1.0) / (2.0 * s * s);
  }
  return r;
}

double eta_afh(int measure, const UserCountPmf& pmf, double u) {
  check_u(u);
  if (measure != 1 && measure != 2) throw std::invalid_argument("AFH measure must be 1 or 2");
  double s = 0.0;
  for (int n = 1; n <= pmf.n_max(); ++n) {
    double term = pmf.prob(n) * std::pow(1.0 - 1.0 / n, n - 1);
    if (measure == 2) term /= n;
    s += term;
  }
  return 0.5 * u * s;
}

namespace {

void check_support(const UserCountPmf& pmf, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (pmf.n_max() > n_max)
    throw std::invalid_argument("user-count pmf has mass above n_max");
}

}  // namespace

PropositionCheck proposition1_check(const UserCountPmf& pmf, int n_max) {
  check_support(pmf, n_max);
  PropositionCheck c;
  c.mean_users = pmf.mean();
  c.condition_lhs = c.mean_users;
  c.condition_rhs = 0.5 * std::log((std::numbers::e * std::numbers::e - 1.0) * n_max);
  c.condition = c.condition_lhs < c.condition_rhs;
  const double u = n_max;
  c.fh_value = eta1_fh(pmf, u).value;
  c.fd_value = eta1_fd(pmf, n_max, u);
  c.fh_beats_fd = c.fh_value > c.fd_value;
  return c;
}

PropositionCheck proposition2_check(const UserCountPmf& pmf, int n_max) {
  check_support(pmf, n_max);
  PropositionCheck c;
  const double m = pmf.mean();
  c.mean_users = m;
  c.condition_lhs = m >= 1.0 ? std::pow(1.0 - 1.0 / m, m - 1.0) / m : 0.0;
  c.condition_rhs = 1.0 / n_max;
  c.condition = m >= 1.0 && c.condition_lhs > c.condition_rhs;
  const double u = n_max;
  c.fh_value = eta2_fh(pmf, u).value;
  c.fd_value = eta2_fd(pmf, n_max, u);
  c.fh_beats_fd = c.fh_value > c.fd_value;
  return c;
}

MeasureReport report_fh(const UserCountPmf& pmf, double u, bool full_service) {
  MeasureReport r;
  r.scheme = Scheme::fh;
  r.u = u;
  const Maximum m1 = eta1_fh(pmf, u);
  const Maximum m2 = eta2_fh(pmf, u);
  r.eta1 = m1.value;
  r.eta2 = m2.value;
  r.v_star = m1.argmax;
  r.v_dagger = m2.argmax;
  r.eta3 = eta3(Scheme::fh, std::max(1, pmf.n_max()), u);
  double v4 = m1.argmax;
  if (full_service && v4 >= u) v4 = u - default_backoff(u);
  r.v_service = v4;
  r.eta4 = eta4_fh(pmf, v4, u);
  return r;
}

MeasureReport report_fd(const UserCountPmf& pmf, const FdConfig& fd, double u) {
  MeasureReport r;
  r.scheme = Scheme::fd;
  r.u = u;
  r.n_des = fd.n_des;
  r.eta1 = eta1_fd(pmf, fd.n_des, u);
  r.eta2 = eta2_fd(pmf, fd.n_des, u);
  r.eta3 = eta3(Scheme::fd, fd.n_des, u);
  r.eta4 = eta4_fd(pmf, fd.n_des);
  return r;
}

MeasureReport report_afh(const UserCountPmf& pmf, double u) {
  MeasureReport r;
  r.scheme = Scheme::afh;
  r.u = u;
  r.eta1 = eta_afh(1, pmf, u);
  r.eta2 = eta_afh(2, pmf, u);
  r.eta3 = eta3(Scheme::fh, std::max(1, pmf.n_max()), u);
  r.eta4 = 1.0;
  return r;
}

}  // namespace fhs
