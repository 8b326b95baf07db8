// Derivative-free maximization on a closed interval.
//
// A uniform grid locates the best bracket, golden-section search refines it.
// Objectives here (expected sum multiplexing gain under an arbitrary user-count
// law) can be multimodal, so the grid pass is what makes the result global.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace fhs {

struct Maximum {
  double argmax = 0.0;
  double value = 0.0;
};

struct MaximizeOptions {
  std::size_t grid_points = 4097;
  // Golden-section stops once the bracket is narrower than this fraction of
  // (hi - lo).
  double relative_width = 1e-9;
};

// Ties are broken toward the smaller argument.
template <class F>
Maximum maximize_on_interval(F&& f, double lo, double hi,
                             const MaximizeOptions& opts = {}) {
  if (!(hi >= lo)) throw std::invalid_argument("maximize_on_interval: hi < lo");
  if (opts.grid_points < 3)
    throw std::invalid_argument("maximize_on_interval: need at least 3 grid points");
  if (hi == lo) return {lo, f(lo)};

  const std::size_t n = opts.grid_points;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  auto grid_x = [&](std::size_t k) {
    return k + 1 == n ? hi : lo + static_cast<double>(k) * step;
  };

  std::size_t best_k = 0;
  double best_val = f(lo);
  for (std::size_t k = 1; k < n; ++k) {
    const double val = f(grid_x(k));
    if (val > best_val) {
      best_val = val;
      best_k = k;
    }
  }

  double a = grid_x(best_k == 0 ? 0 : best_k - 1);
  double b = grid_x(best_k + 1 >= n ? n - 1 : best_k + 1);
  const double tol = opts.relative_width * (hi - lo);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double x_ref = f1 >= f2 ? x1 : x2;
  const double f_ref = f1 >= f2 ? f1 : f2;
  if (f_ref > best_val) return {x_ref, f_ref};
  return {grid_x(best_k), best_val};
}

}  // namespace fhs
