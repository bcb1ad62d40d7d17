#pragma once

#include <span>
#include <vector>

#include "fencelab/fields.hpp"

namespace fencelab {

struct EnergyReport {
  double e_tilde = 0.0;
  double e_hat = 0.0;
  double per_omega = 0.0;
  double iso_ratio = 0.0;
};

/// Heat-content estimate of |boundary of u|: sqrt(pi/tau) * int u G_tau*(1-u).
double perimeter_estimate(const IndicatorField& u, double tau);

/// sqrt(pi/tau) * sum_i sum_{j != i} int u_i (G_tau * u_j).
double energy_hat(const Partition& p, double tau);

/// (1/sqrt(tau)) * sum_{i != j} int u_i (G_tau * u_j); energy_hat / sqrt(pi).
double heat_content(const Partition& p, double tau);

/// Region-restricted approximation of the partition length, evaluated with
/// the phases of `p` against a (possibly different) region `u_omega`.
double energy_tilde(const IndicatorField& u_omega, const Partition& p, double tau);

/// 4 pi |u| / P^2 in 2D, 36 pi |u|^2 / P^3 in 3D, with P = perimeter_estimate.
/// Equals 1 for the disc/ball in the continuum limit.
double isoperimetric_ratio(const IndicatorField& u, double tau);

/// Two-level extrapolation 2 P(tau/2) - P(tau) of perimeter_estimate, which
/// cancels the O(tau) curvature bias of the heat-content estimate.
double perimeter_extrapolated(const IndicatorField& u, double tau);
/// isoperimetric_ratio with perimeter_extrapolated in place of the plain
/// estimate; used where sqrt(tau) is not small against the radius (3D).
double isoperimetric_ratio_extrapolated(const IndicatorField& u, double tau);

/// Mean of trace entries k-M+1 .. k (1-based).
double averaged_energy(std::span<const double> trace, int M, int k);

EnergyReport evaluate(const IndicatorField& u_omega, const Partition& p, double tau);

namespace detail {

/// Shared pieces of energy_tilde and the dominant functions, on the cell grid:
/// S = G_{tau/2} * (sum_i u_i) (clamped >= 0) and Q = sum_i (G_{tau/2} * u_i)^2.
struct HalfStepTerms {
  std::vector<double> s;
  std::vector<double> sum_sq;
};
HalfStepTerms half_step_terms(const Partition& p, double tau);

}  // namespace detail

}  // namespace fencelab
