#include "fencelab/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fencelab/energy.hpp"
#include "fencelab/spectral.hpp"

namespace fencelab {

namespace {

// phi descending, then canonical cell order.
auto ranks_above(const ScalarField& phi) {
  return [&phi](std::size_t a, std::size_t b) { return phi[a] > phi[b] || (phi[a] == phi[b] && a < b); };
}

std::vector<std::size_t> top_k(std::vector<std::size_t> cells, const ScalarField& phi, std::size_t k) {
  k = std::min(k, cells.size());
  auto cmp = ranks_above(phi);
  std::nth_element(cells.begin(), cells.begin() + k, cells.end(), cmp);
  cells.resize(k);
  return cells;
}

std::vector<std::size_t> bottom_k(std::vector<std::size_t> cells, const ScalarField& phi, std::size_t k) {
  k = std::min(k, cells.size());
  // phi ascending, then canonical cell order.
  auto cmp = [&phi](std::size_t a, std::size_t b) { return phi[a] < phi[b] || (phi[a] == phi[b] && a < b); };
  std::nth_element(cells.begin(), cells.begin() + k, cells.end(), cmp);
  cells.resize(k);
  return cells;
}

}  // namespace

ScalarField dominant_function_1(const IndicatorField& u_omega, const Partition& p, double tau) {
  if (!(tau > 0.0)) throw Error("dominant_function: tau must be positive");
  require_same_spec(u_omega.spec(), p.spec(), "dominant_function");
  const auto& spec = p.spec();
  const std::size_t cells = spec.cells();
  auto terms = detail::half_step_terms(p, tau);
  auto omega = u_omega.values();

  std::vector<double> root_s(cells);
  std::vector<double> signed_root(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    root_s[c] = std::sqrt(terms.s[c]);
    signed_root[c] = root_s[c] * (omega[c] ? 1.0 : -1.0);
  }
  gaussian_convolve(spec, signed_root, signed_root, tau / 2);

  const double scale = std::sqrt(std::numbers::pi / tau);
  ScalarField phi(spec);
  for (std::size_t c = 0; c < cells; ++c)
    phi[c] = scale * (terms.s[c] - terms.sum_sq[c] + root_s[c] * signed_root[c]);
  return phi;
}

ScalarField dominant_function_2(const IndicatorField& u_omega, const Partition& p, double tau, double lambda,
                                double tau_prime) {
  if (!(tau_prime > 0.0)) throw Error("dominant_function_2: tau_prime must be positive");
  if (!(lambda >= 0.0)) throw Error("dominant_function_2: lambda must be nonnegative");
  ScalarField phi = dominant_function_1(u_omega, p, tau);
  if (lambda == 0.0) return phi;
  auto covered = gaussian_convolve(p.support(), tau_prime);
  for (std::size_t c = 0; c < phi.size(); ++c) phi[c] += lambda * covered[c];
  return phi;
}

IndicatorField threshold_volume(const ScalarField& phi, std::size_t k_cells) {
  if (k_cells > phi.size()) throw Error("threshold_volume: k_cells exceeds the grid");
  std::vector<std::size_t> all(phi.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  auto chosen = top_k(std::move(all), phi, k_cells);
  return IndicatorField::from_cells(phi.spec(), chosen);
}

PartialUpdate partial_update(const IndicatorField& u_prev, const IndicatorField& u_process, const ScalarField& phi,
                             double beta) {
  require_same_spec(u_prev.spec(), u_process.spec(), "partial_update");
  require_same_spec(u_prev.spec(), phi.spec(), "partial_update");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("partial_update: beta must lie in [0, 1]");
  if (u_prev.count() != u_process.count())
    throw Error("partial_update: proposed region has " + std::to_string(u_process.count()) + " cells, expected " +
                std::to_string(u_prev.count()));

  UpdateSets sets;
  sets.add = set_difference(u_process, u_prev);
  sets.remove = set_difference(u_prev, u_process);
  sets.k_cells = static_cast<std::size_t>(std::floor(beta * static_cast<double>(sets.add.count()) + 0.5));

  auto added = top_k(sets.add.active_cells(), phi, sets.k_cells);
  auto removed = bottom_k(sets.remove.active_cells(), phi, sets.k_cells);
  sets.add_applied = IndicatorField::from_cells(phi.spec(), added);
  sets.remove_applied = IndicatorField::from_cells(phi.spec(), removed);

  std::vector<std::uint8_t> next(u_prev.values().begin(), u_prev.values().end());
  for (auto c : added) next[c] = 1;
  for (auto c : removed) next[c] = 0;
  IndicatorField region(u_prev.spec(), std::move(next));
  return {std::move(region), std::move(sets)};
}

}  // namespace fencelab
