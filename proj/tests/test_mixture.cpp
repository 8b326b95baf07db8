#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fhs/mixture.hpp"

using namespace fhs;

namespace {

const double kHalfLog2PiE = 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e);

GaussianMixture1D random_mixture(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_k(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> log_ratio(-2.0, 6.0);
  const int k = pick_k(rng);
  std::vector<double> w(k);
  double sum = 0.0;
  for (double& x : w) sum += (x = unit(rng) + 1e-3);
  std::vector<MixtureComponent> comps;
  for (int i = 0; i < k; ++i)
    comps.push_back({w[i] / sum, i == 0 ? 1.0 : 1.0 + std::pow(10.0, log_ratio(rng))});
  double total = 0.0;
  for (int i = 0; i + 1 < k; ++i) total += comps[i].weight;
  comps.back().weight = 1.0 - total;
  return GaussianMixture1D(comps);
}

}  // namespace

TEST_CASE("scalar log density") {
  const GaussianMixture1D single({{1.0, 1.0}});
  CHECK(log_density(single, 0.0) == doctest::Approx(std::log(1.0 / std::sqrt(2.0 * std::numbers::pi))));
  const GaussianMixture1D twins({{0.5, 1.0}, {0.5, 1.0}});
  for (double x : {0.0, 0.7, -3.0}) CHECK(log_density(twins, x) == doctest::Approx(log_density(single, x)));

  // {(0.5, sigma^2), (0.5, sigma^2 + P)} with sigma^2 = 1, P = 3 at the origin.
  const GaussianMixture1D two({{0.5, 1.0}, {0.5, 4.0}});
  const double pi = std::numbers::pi;
  CHECK(log_density(two, 0.0) ==
        doctest::Approx(std::log(0.5 / std::sqrt(2 * pi) + 0.5 / std::sqrt(8 * pi))));
}

TEST_CASE("log density survives huge variance ratios") {
  const GaussianMixture1D m({{0.5, 1.0}, {0.5, 1e16}});
  const double at_origin = log_density(m, 0.0);
  CHECK(std::isfinite(at_origin));
  CHECK(at_origin == doctest::Approx(std::log(0.5 / std::sqrt(2 * std::numbers::pi))).epsilon(1e-6));
  CHECK(std::isfinite(log_density(m, 1e7)));
}

TEST_CASE("mixture construction checks") {
  CHECK_THROWS_AS(GaussianMixture1D({{0.5, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(GaussianMixture1D({{1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(GaussianMixtureDiag({{1.0, {1.0}}, {0.0, {1.0, 2.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(GaussianMixtureDiag(std::vector<DiagComponent>{{1.0, {-1.0}}}), std::invalid_argument);
  const GaussianMixture1D m({{0.25, 1.0}, {0.75, 5.0}, {0.0, 100.0}});
  CHECK(m.variance() == doctest::Approx(4.0));
  CHECK(m.min_variance() == 1.0);
  CHECK(m.max_variance() == 5.0);
}

TEST_CASE("vector log density with degenerate axes") {
  const double pi = std::numbers::pi;
  const GaussianMixtureDiag product({{1.0, {1.0, 4.0}}});
  CHECK(log_density(product, std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(-std::log(2 * pi) - 0.5 * std::log(4.0)));

  // Second component lives on the first axis only.
  const GaussianMixtureDiag mixed({{0.5, {1.0, 1.0}}, {0.5, {1.0, 0.0}}});
  const double on_line = log_density(mixed, std::vector<double>{0.3, 0.0});
  CHECK(on_line == doctest::Approx(std::log(0.5) - 0.5 * std::log(2 * pi) - 0.045));
  const double off_line = log_density(mixed, std::vector<double>{0.3, 0.2});
  CHECK(off_line == doctest::Approx(std::log(0.5) - std::log(2 * pi) - 0.045 - 0.02));

  const GaussianMixtureDiag point(std::vector<DiagComponent>{{1.0, {0.0}}});
  CHECK(log_density(point, std::vector<double>{1.0}) == -INFINITY);
  CHECK_THROWS(log_density(product, std::vector<double>{0.0}));
}

TEST_CASE("iid product expands the components") {
  const GaussianMixture1D m({{0.25, 1.0}, {0.75, 3.0}});
  const auto p = GaussianMixtureDiag::iid_product(m, 2);
  CHECK(p.dim() == 2);
  CHECK(p.components().size() == 4);
  const std::vector<double> x{0.4, -1.1};
  CHECK(log_density(p, x) == doctest::Approx(log_density(m, 0.4) + log_density(m, -1.1)));
}

TEST_CASE("quadrature entropy of Gaussians") {
  for (double var : {1e-4, 1.0, 3.0, 1e6}) {
    const GaussianMixture1D g({{1.0, var}});
    CHECK(entropy_quadrature(g) == doctest::Approx(gaussian_entropy_bits(var)).epsilon(1e-9));
  }
  const GaussianMixture1D twins({{0.5, 1.0}, {0.5, 1.0}});
  CHECK(entropy_quadrature(twins) == doctest::Approx(kHalfLog2PiE).epsilon(1e-9));
}

TEST_CASE("quadrature entropy of two-level mixtures, frozen values") {
  // Reference values from an independent adaptive integration at 1e-14.
  const GaussianMixture1D a({{0.5, 1.0}, {0.5, 4.0}});
  CHECK(std::abs(entropy_quadrature(a) - 2.68088157503563798) < 1e-7);
  CHECK(entropy_quadrature(a) <= gaussian_entropy_bits(2.5));
  CHECK(entropy_quadrature(a) >= 0.5 * gaussian_entropy_bits(1.0) + 0.5 * gaussian_entropy_bits(4.0));
  const GaussianMixture1D b({{0.25, 1.0}, {0.75, 100.0}});
  CHECK(std::abs(entropy_quadrature(b) - 4.99222639512284516) < 1e-7);
}

TEST_CASE("quadrature brackets on random mixtures") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto m = random_mixture(rng);
    const double h = entropy_quadrature(m);
    double conditional = 0.0;
    for (const auto& c : m.components()) conditional += c.weight * gaussian_entropy_bits(c.variance);
    CHECK(h <= gaussian_entropy_bits(m.variance()) + 1e-9);
    CHECK(h >= conditional - 1e-9);
    CHECK(h <= entropy_upper_bound(m) + 1e-9);
  }
}

TEST_CASE("upper bound on mixture entropy") {
  const GaussianMixture1D g({{1.0, 2.0}});
  CHECK(entropy_upper_bound(g) == doctest::Approx(gaussian_entropy_bits(2.0)).epsilon(1e-15));
  // a0 = 1/2, c_L gamma = 3, H = 1 bit: (1/4) log2 4 + log2 sqrt(2 pi e) + 1.
  const GaussianMixture1D two({{0.5, 1.0}, {0.5, 4.0}});
  CHECK(entropy_upper_bound(two) == doctest::Approx(1.5 + kHalfLog2PiE).epsilon(1e-15));
  // Equal variances merge before the discrete entropy is taken.
  const GaussianMixture1D split({{0.25, 1.0}, {0.25, 1.0}, {0.5, 4.0}});
  CHECK(entropy_upper_bound(split) == doctest::Approx(entropy_upper_bound(two)).epsilon(1e-15));
}

TEST_CASE("Monte-Carlo entropy") {
  const GaussianMixtureDiag g1(std::vector<DiagComponent>{{1.0, {2.0}}});
  const auto e1 = entropy_mc(g1, 100000, 1);
  CHECK(std::abs(e1.value - gaussian_entropy_bits(2.0)) <= 3 * e1.std_error);

  const GaussianMixtureDiag g2({{1.0, {1.0, 1.0}}});
  const auto e2 = entropy_mc(g2, 100000, 2);
  CHECK(std::abs(e2.value - 2 * kHalfLog2PiE) <= 3 * e2.std_error);

  const GaussianMixture1D m({{0.5, 1.0}, {0.5, 4.0}});
  const auto e3 = entropy_mc(GaussianMixtureDiag::iid_product(m, 1), 200000, 3);
  CHECK(std::abs(e3.value - entropy_quadrature(m)) <= 4 * e3.std_error);

  CHECK_THROWS_AS(entropy_mc(g1, 99, 1), std::invalid_argument);
}

TEST_CASE("Monte-Carlo entropy agrees with quadrature on random mixtures") {
  std::mt19937_64 rng(99);
  int outside = 0;
  for (int t = 0; t < 40; ++t) {
    const auto m = random_mixture(rng);
    const auto e = entropy_mc(GaussianMixtureDiag::iid_product(m, 1), 50000, 1000 + t);
    if (std::abs(e.value - entropy_quadrature(m)) > 4 * e.std_error) ++outside;
  }
  CHECK(outside == 0);
}

TEST_CASE("Monte-Carlo entropy with point masses on some axes") {
  // Axis 2 is exactly zero half the time: a mixed discrete-continuous law
  // whose entropy is H(1/2) + 0.5 h(N(0,1)) in excess of axis 1.
  const GaussianMixtureDiag m({{0.5, {1.0, 1.0}}, {0.5, {1.0, 0.0}}});
  const auto e = entropy_mc(m, 100000, 5);
  const double expected = 1.0 + gaussian_entropy_bits(1.0) + 0.5 * gaussian_entropy_bits(1.0);
  CHECK(std::abs(e.value - expected) <= 4 * e.std_error + 1e-12);
}

TEST_CASE("Monte-Carlo entropy does not depend on the worker count") {
  const GaussianMixtureDiag m({{0.3, {1.0, 9.0}}, {0.7, {25.0, 1.0}}});
  const auto a = entropy_mc(m, 50000, 42, 1);
  const auto b = entropy_mc(m, 50000, 42, 5);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  const auto c = entropy_mc(m, 50000, 43, 1);
  CHECK(a.value != c.value);
}

TEST_CASE("mixture from a spectrum") {
  const InterferenceSpectrum s(0, {{0.25, 0.0, 1.0}, {0.75, 2.0, 5.0}});
  const auto m = mixture_of(s);
  REQUIRE(m.components().size() == 2);
  CHECK(m.components()[1].weight == 0.75);
  CHECK(m.components()[1].variance == 5.0);
}
