// Zero-mean Gaussian mixtures (scalar and diagonal-covariance vector) and their
// differential entropies. Entropies are in bits; log densities are natural.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fhs/model.hpp"

namespace fhs {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct MixtureComponent {
  double weight;
  double variance;
};

class GaussianMixture1D {
 public:
  explicit GaussianMixture1D(std::vector<MixtureComponent> components);

  const std::vector<MixtureComponent>& components() const noexcept { return components_; }
  double variance() const noexcept;
  double min_variance() const noexcept;
  double max_variance() const noexcept;

 private:
  std::vector<MixtureComponent> components_;
};

struct DiagComponent {
  double weight;
  // A zero entry means the component puts all its mass at 0 on that axis.
  std::vector<double> variances;
};

class GaussianMixtureDiag {
 public:
  explicit GaussianMixtureDiag(std::vector<DiagComponent> components);
  // dim independent copies of m, expanded into the product mixture.
  static GaussianMixtureDiag iid_product(const GaussianMixture1D& m, std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<DiagComponent>& components() const noexcept { return components_; }

 private:
  std::size_t dim_;
  std::vector<DiagComponent> components_;
};

double log_density(const GaussianMixture1D& m, double x);

// Density with respect to Lebesgue measure on the lowest-dimensional support
// compatible with x: a component with zero variance on axis j only counts when
// x_j == 0, and when several supports fit, the one with the most degenerate
// axes wins (it carries point mass the others lack). Returns -infinity when no
// component can produce x.
double log_density(const GaussianMixtureDiag& m, std::span<const double> x);

inline constexpr double kDefaultQuadratureTol = 1e-6;

// -integral p log2 p by adaptive Gauss-Kronrod on a truncated symmetric range.
// Throws std::runtime_error if the error estimate stays above tol.
double entropy_quadrature(const GaussianMixture1D& m, double tol = kDefaultQuadratureTol);

// Plug-in estimate -mean log2 p(X_s), X_s ~ m. The sample stream is split
// into fixed chunks with their own derived seeds, so the estimate does not
// depend on `threads`.
Estimate entropy_mc(const GaussianMixtureDiag& m, std::size_t n_samples,
                    std::uint64_t seed, int threads = 1);

// Closed-form upper bound on the entropy of a scalar mixture whose smallest
// variance is the ambient noise level:
//   (1 - a0)/2 log2(1 + c_L gamma) + log2(sqrt(2 pi e) sigma) + H(a)
// where a0 is the weight of the smallest variance and H the discrete entropy
// of the weights after equal variances are merged.
double entropy_upper_bound(const GaussianMixture1D& m);

// Entropy of N(0, variance), bits.
double gaussian_entropy_bits(double variance);

GaussianMixture1D mixture_of(const InterferenceSpectrum& spectrum);

}  // namespace fhs
