#pragma once

// Reference computations that share no code with the library's spectral
// path: direct spatial sums, lattice sums and exhaustive enumeration.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "fencelab/fields.hpp"

namespace oracle {

using fencelab::GridSpec;

/// Periodic discrete heat kernel along one axis: the inverse DFT of
/// exp(-tau xi^2) over xi = -n/2 .. n/2-1, written as a cosine sum.
inline std::vector<double> kernel_1d(int n, double tau) {
  const double dx = 2.0 * std::numbers::pi / n;
  std::vector<double> k(n, 0.0);
  for (int m = 0; m < n; ++m) {
    double s = 0.0;
    for (int xi = -n / 2; xi < n / 2; ++xi) s += std::exp(-tau * xi * xi) * std::cos(xi * m * dx);
    k[m] = s / n;
  }
  return k;
}

/// O(N^2) direct-sum periodic convolution with the separable kernel above.
inline std::vector<double> direct_convolve(const GridSpec& spec, const std::vector<double>& u, double tau) {
  const int n = spec.n_axis();
  const auto k = kernel_1d(n, tau);
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t x = 0; x < u.size(); ++x) {
    const auto xi = spec.unravel(x);
    double acc = 0.0;
    for (std::size_t y = 0; y < u.size(); ++y) {
      if (u[y] == 0.0) continue;
      const auto yi = spec.unravel(y);
      double w = 1.0;
      for (int a = 0; a < spec.dim(); ++a) w *= k[((xi[a] - yi[a]) % n + n) % n];
      acc += w * u[y];
    }
    out[x] = acc;
  }
  return out;
}

/// Periodised 2D heat kernel (4 pi tau)^-1 sum_m exp(-|x - 2 pi m|^2 / (4 tau)), |m_a| <= 3.
inline double lattice_gaussian_2d(double x, double y, double tau) {
  double s = 0.0;
  for (int mx = -3; mx <= 3; ++mx)
    for (int my = -3; my <= 3; ++my) {
      const double dx = x - 2.0 * std::numbers::pi * mx;
      const double dy = y - 2.0 * std::numbers::pi * my;
      s += std::exp(-(dx * dx + dy * dy) / (4.0 * tau));
    }
  return s / (4.0 * std::numbers::pi * tau);
}

inline double integral(const GridSpec& spec, const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * spec.cell_volume();
}

/// Calls visit(labels) for every assignment of m cells to counts.size()
/// phases with exactly counts[i] cells in phase i.
inline void for_each_assignment(int m, std::vector<std::size_t> counts,
                                const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> labels(m, -1);
  std::function<void(int)> rec = [&](int x) {
    if (x == m) {
      visit(labels);
      return;
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0) continue;
      --counts[i];
      labels[x] = static_cast<int>(i);
      rec(x + 1);
      ++counts[i];
    }
  };
  rec(0);
}

}  // namespace oracle
