#pragma once

#include <span>
#include <vector>

#include "fencelab/fields.hpp"

namespace fencelab {

/// Fourier multiplier exp(-tau |xi|^2) of the periodic heat semigroup.
///
/// The domain has period 2*pi, so frequencies are integers in
/// [-n/2, n/2 - 1] per axis. Values are laid out to match the real-to-complex
/// half spectrum: the last axis only holds frequencies 0..n/2.
struct HeatMultiplier {
  GridSpec spec;
  double tau = 0.0;
  std::vector<double> values;

  static HeatMultiplier make(const GridSpec& spec, double tau);

  /// Signed integer frequency of index `k` along a full (not halved) axis.
  static int frequency(int k, int n) { return k < n / 2 ? k : k - n; }
  /// Multiplier at an arbitrary integer frequency vector.
  double at(int fx, int fy, int fz = 0) const;
};

/// Periodic Gaussian convolution G_tau * u (heat flow for time tau).
///
/// Output is clamped to [min(u), max(u)]; the exact semigroup satisfies this
/// bound, so the clamp only removes FFT roundoff (and keeps nonnegative
/// inputs nonnegative before square roots are taken).
ScalarField gaussian_convolve(const ScalarField& u, double tau);
ScalarField gaussian_convolve(const IndicatorField& u, double tau);

/// Span form used on hot paths; `in` and `out` may alias.
void gaussian_convolve(const GridSpec& spec, std::span<const double> in, std::span<double> out, double tau);

namespace detail {
/// Raw spectral result without the range clamp (diagnostics only).
ScalarField gaussian_convolve_unclamped(const ScalarField& u, double tau);
}  // namespace detail

/// max |G_{tau/2} * (G_{tau/2} * u) - G_tau * u|.
double semigroup_property_check(const ScalarField& u, double tau);

}  // namespace fencelab
