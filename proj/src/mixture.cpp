#include "fhs/mixture.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "fhs/parallel.hpp"
#include "fhs/random.hpp"

namespace fhs {

namespace {

constexpr double kWeightSumTolerance = 1e-12;
constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)
constexpr std::size_t kMcChunk = 4096;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_weights(double sum) {
  if (std::abs(sum - 1.0) > kWeightSumTolerance)
    throw std::invalid_argument("mixture weights must sum to 1");
}

double log_sum_exp(std::span<const double> terms) {
  double top = kNegInf;
  for (double t : terms) top = std::max(top, t);
  if (top == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

// Per-component constants for repeated density evaluation.
class DiagEvaluator {
 public:
  explicit DiagEvaluator(const GaussianMixtureDiag& m) : dim_(m.dim()) {
    for (const auto& c : m.components()) {
      if (c.weight <= 0.0) continue;
      double offset = std::log(c.weight);
      int n_deg = 0;
      for (double var : c.variances) {
        if (var > 0.0) {
          offset -= 0.5 * (kLog2Pi + std::log(var));
          half_inv_var_.push_back(0.5 / var);
        } else {
          ++n_deg;
          half_inv_var_.push_back(0.0);
        }
      }
      offset_.push_back(offset);
      n_degenerate_.push_back(n_deg);
      any_degenerate_ = any_degenerate_ || n_deg > 0;
    }
    terms_.resize(offset_.size());
  }

  double operator()(std::span<const double> x) {
    if (x.size() != dim_) throw std::invalid_argument("log_density: dimension mismatch");
    const std::size_t k_count = offset_.size();
    int support_deg = 0;
    if (any_degenerate_) {
      support_deg = -1;
      for (std::size_t k = 0; k < k_count; ++k)
        if (compatible(k, x)) support_deg = std::max(support_deg, n_degenerate_[k]);
      if (support_deg < 0) return kNegInf;
    }
    for (std::size_t k = 0; k < k_count; ++k) {
      if (any_degenerate_ && (n_degenerate_[k] != support_deg || !compatible(k, x))) {
        terms_[k] = kNegInf;
        continue;
      }
      const double* hiv = &half_inv_var_[k * dim_];
      double q = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) q += x[j] * x[j] * hiv[j];
      terms_[k] = offset_[k] - q;
    }
    return log_sum_exp(terms_);
  }

 private:
  bool compatible(std::size_t k, std::span<const double> x) const {
    const double* hiv = &half_inv_var_[k * dim_];
    for (std::size_t j = 0; j < dim_; ++j)
      if (hiv[j] == 0.0 && x[j] != 0.0) return false;
    return true;
  }

  std::size_t dim_;
  std::vector<double> offset_;
  std::vector<double> half_inv_var_;
  std::vector<int> n_degenerate_;
  bool any_degenerate_ = false;
  std::vector<double> terms_;
};

struct ChunkMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
};

}  // namespace

GaussianMixture1D::GaussianMixture1D(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("mixture needs a component");
  double sum = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0)) throw std::invalid_argument("mixture weights must be >= 0");
    if (!(c.variance > 0.0) || !std::isfinite(c.variance))
      throw std::invalid_argument("scalar mixture variances must be positive");
    sum += c.weight;
  }
  check_weights(sum);
}

double GaussianMixture1D::variance() const noexcept {
  double v = 0.0;
  for (const auto& c : components_) v += c.weight * c.variance;
  return v;
}

double GaussianMixture1D::min_variance() const noexcept {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& c : components_)
    if (c.weight > 0.0) v = std::min(v, c.variance);
  return v;
}

double GaussianMixture1D::max_variance() const noexcept {
  double v = 0.0;
  for (const auto& c : components_)
    if (c.weight > 0.0) v = std::max(v, c.variance);
  return v;
}

GaussianMixtureDiag::GaussianMixtureDiag(std::vector<DiagComponent> components)
    : dim_(components.empty() ? 0 : components.front().variances.size()),
      components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("mixture needs a component");
  if (dim_ == 0) throw std::invalid_argument("mixture dimension must be >= 1");
  double sum = 0.0;
  for (const auto& c : components_) {
    if (c.variances.size() != dim_)
      throw std::invalid_argument("all components must share one dimension");
    if (!(c.weight >= 0.0)) throw std::invalid_argument("mixture weights must be >= 0");
    for (double v : c.variances)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("component variances must be >= 0");
    sum += c.weight;
  }
  check_weights(sum);
}

GaussianMixtureDiag GaussianMixtureDiag::iid_product(const GaussianMixture1D& m,
                                                     std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  std::vector<DiagComponent> out{{1.0, {}}};
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<DiagComponent> next;
    next.reserve(out.size() * m.components().size());
    for (const auto& partial : out)
      for (const auto& c : m.components()) {
        DiagComponent d{partial.weight * c.weight, partial.variances};
        d.variances.push_back(c.variance);
        next.push_back(std::move(d));
      }
    out = std::move(next);
  }
  return GaussianMixtureDiag(std::move(out));
}

double log_density(const GaussianMixture1D& m, double x) {
  double top = kNegInf;
  for (const auto& c : m.components())
    if (c.weight > 0.0)
      top = std::max(top, std::log(c.weight) - 0.5 * (kLog2Pi + std::log(c.variance)) -
                              0.5 * x * x / c.variance);
  if (top == kNegInf) return kNegInf;
  double s = 0.0;
  for (const auto& c : m.components())
    if (c.weight > 0.0)
      s += std::exp(std::log(c.weight) - 0.5 * (kLog2Pi + std::log(c.variance)) -
                    0.5 * x * x / c.variance - top);
  return top + std::log(s);
}

double log_density(const GaussianMixtureDiag& m, std::span<const double> x) {
  DiagEvaluator eval(m);
  return eval(x);
}

double gaussian_entropy_bits(double variance) {
  return 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * variance);
}

double entropy_quadrature(const GaussianMixture1D& m, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  const double vmin = m.min_variance();
  const double vmax = m.max_variance();
  const double smin = std::sqrt(vmin);
  const double smax = std::sqrt(vmax);

  // Truncation point: tail mass times a generous bound on -log2 p there.
  auto tail_mass = [&](double k) {
    double s = 0.0;
    for (const auto& c : m.components())
      if (c.weight > 0.0) s += c.weight * std::erfc(k * smax / std::sqrt(2.0 * c.variance));
    return s;
  };
  const double log_scale = std::abs(gaussian_entropy_bits(vmax)) + 10.0;
  double k = 8.0;
  while (k < 80.0 && tail_mass(k) * (k * k + log_scale) > tol / 10.0) k += 1.0;
  const double upper = k * smax;

  std::vector<double> breaks{0.0};
  const double fine_end = std::min(upper, 10.0 * smin);
  const double fine_step = smin / 8.0;
  while (breaks.back() + fine_step < fine_end) breaks.push_back(breaks.back() + fine_step);
  breaks.push_back(fine_end);
  while (breaks.back() < upper) breaks.push_back(std::min(upper, breaks.back() * 1.5));

  auto integrand = [&](double x) {
    const double lp = log_density(m, x);
    if (lp == kNegInf) return 0.0;
    return -std::exp(lp) * lp * std::numbers::log2e;
  };

  // Each segment gets an absolute share of the budget, expressed relative to
  // its own L1 norm. A fixed relative target is unreachable in the far tail,
  // where the integrand underflows, and would force maximal refinement there.
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double segment_budget = tol / (20.0 * static_cast<double>(breaks.size()));
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double err = 0.0;
    double l1 = 0.0;
    Kronrod::integrate(integrand, breaks[i], breaks[i + 1], 0, 0.0, &err, &l1);
    const double rel = l1 > 0.0 ? std::max(1e-12, segment_budget / l1) : 1.0;
    total += Kronrod::integrate(integrand, breaks[i], breaks[i + 1], 15, rel, &err);
    total_error += err;
  }
  if (!(2.0 * total_error <= tol))
    throw std::runtime_error("entropy_quadrature did not converge: error estimate " +
                             std::to_string(2.0 * total_error) + " > tol");
  return 2.0 * total;
}

Estimate entropy_mc(const GaussianMixtureDiag& m, std::size_t n_samples,
                    std::uint64_t seed, int threads) {
  if (n_samples < 100) throw std::invalid_argument("entropy_mc needs n_samples >= 100");
  const auto& comps = m.components();
  std::vector<double> cumulative;
  cumulative.reserve(comps.size());
  double acc = 0.0;
  for (const auto& c : comps) cumulative.push_back(acc += c.weight);

  const std::size_t n_chunks = (n_samples + kMcChunk - 1) / kMcChunk;
  std::vector<ChunkMoments> chunks(n_chunks);
  parallel_for(n_chunks, threads, [&](std::size_t chunk) {
    DiagEvaluator eval(m);
    CounterRng rng(derive_seed(seed, chunk));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(m.dim());
    const std::size_t begin = chunk * kMcChunk;
    const std::size_t end = std::min(n_samples, begin + kMcChunk);
    ChunkMoments& mom = chunks[chunk];
    for (std::size_t s = begin; s < end; ++s) {
      const double r = rng.uniform() * acc;
      std::size_t k = std::upper_bound(cumulative.begin(), cumulative.end(), r) -
                      cumulative.begin();
      k = std::min(k, comps.size() - 1);
      while (comps[k].weight <= 0.0 && k > 0) --k;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double var = comps[k].variances[j];
        x[j] = var > 0.0 ? std::sqrt(var) * normal(rng) : 0.0;
      }
      const double lp = eval(x);
      if (lp == kNegInf) throw std::logic_error("entropy_mc drew a point outside the support");
      const double value = -lp * std::numbers::log2e;
      ++mom.n;
      const double delta = value - mom.mean;
      mom.mean += delta / static_cast<double>(mom.n);
      mom.m2 += delta * (value - mom.mean);
    }
  });

  ChunkMoments total;
  for (const auto& c : chunks) {
    if (c.n == 0) continue;
    const double n = static_cast<double>(total.n + c.n);
    const double delta = c.mean - total.mean;
    total.mean += delta * static_cast<double>(c.n) / n;
    total.m2 += c.m2 + delta * delta * static_cast<double>(total.n) *
                           static_cast<double>(c.n) / n;
    total.n += c.n;
  }
  const double var = total.m2 / static_cast<double>(total.n - 1);
  return {total.mean, std::sqrt(var / static_cast<double>(total.n))};
}

double entropy_upper_bound(const GaussianMixture1D& m) {
  auto comps = m.components();
  std::sort(comps.begin(), comps.end(),
            [](const MixtureComponent& a, const MixtureComponent& b) {
              return a.variance < b.variance;
            });
  std::vector<MixtureComponent> merged;
  for (const auto& c : comps) {
    if (!merged.empty() && merged.back().variance == c.variance)
      merged.back().weight += c.weight;
    else
      merged.push_back(c);
  }
  const double noise = merged.front().variance;
  const double a0 = merged.front().weight;
  double top = noise;
  for (const auto& c : merged)
    if (c.weight > 0.0) top = std::max(top, c.variance);
  double discrete = 0.0;
  for (const auto& c : merged)
    if (c.weight > 0.0) discrete -= c.weight * std::log2(c.weight);
  return 0.5 * (1.0 - a0) * std::log2(top / noise) + gaussian_entropy_bits(noise) + discrete;
}

GaussianMixture1D mixture_of(const InterferenceSpectrum& spectrum) {
  std::vector<MixtureComponent> comps;
  comps.reserve(spectrum.size());
  for (const auto& l : spectrum.levels()) comps.push_back({l.prob, l.sigma2});
  return GaussianMixture1D(std::move(comps));
}

}  // namespace fhs
