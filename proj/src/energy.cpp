#include "fencelab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fencelab/spectral.hpp"

namespace fencelab {

namespace {

void require_tau(double tau, const char* what) {
  if (!(tau > 0.0)) throw Error(std::string(what) + ": tau must be positive");
}

std::vector<double> indicator_of_label(const Partition& p, int phase) {
  auto labels = p.labels();
  std::vector<double> v(labels.size());
  for (std::size_t c = 0; c < labels.size(); ++c) v[c] = labels[c] == phase ? 1.0 : 0.0;
  return v;
}

}  // namespace

double perimeter_estimate(const IndicatorField& u, double tau) {
  require_tau(tau, "perimeter_estimate");
  const auto& spec = u.spec();
  auto vals = u.values();
  std::vector<double> outside(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) outside[i] = 1.0 - vals[i];
  gaussian_convolve(spec, outside, outside, tau);
  double acc = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i]) acc += outside[i];
  return std::sqrt(std::numbers::pi / tau) * acc * spec.cell_volume();
}

double heat_content(const Partition& p, double tau) {
  require_tau(tau, "energy_hat");
  const auto& spec = p.spec();
  auto labels = p.labels();
  const std::size_t cells = labels.size();

  std::vector<double> smoothed_support(cells);
  for (std::size_t c = 0; c < cells; ++c) smoothed_support[c] = labels[c] >= 0 ? 1.0 : 0.0;
  gaussian_convolve(spec, smoothed_support, smoothed_support, tau);

  // Per-phase terms int u_i G*(support - u_i), summed in sorted order so the
  // total does not depend on phase labelling.
  std::vector<double> terms(p.n(), 0.0);
  std::vector<double> buf;
  for (int i = 0; i < p.n(); ++i) {
    buf = indicator_of_label(p, i);
    gaussian_convolve(spec, buf, buf, tau);
    double acc = 0.0;
    for (std::size_t c = 0; c < cells; ++c)
      if (labels[c] == i) acc += smoothed_support[c] - buf[c];
    terms[i] = acc;
  }
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total * spec.cell_volume() / std::sqrt(tau);
}

double energy_hat(const Partition& p, double tau) { return std::sqrt(std::numbers::pi) * heat_content(p, tau); }

namespace detail {

HalfStepTerms half_step_terms(const Partition& p, double tau) {
  const auto& spec = p.spec();
  const std::size_t cells = spec.cells();
  HalfStepTerms t{std::vector<double>(cells, 0.0), std::vector<double>(cells, 0.0)};
  std::vector<double> buf;
  for (int i = 0; i < p.n(); ++i) {
    buf = indicator_of_label(p, i);
    gaussian_convolve(spec, buf, buf, tau / 2);
    for (std::size_t c = 0; c < cells; ++c) {
      t.s[c] += buf[c];
      t.sum_sq[c] += buf[c] * buf[c];
    }
  }
  for (auto& s : t.s) s = std::max(s, 0.0);
  return t;
}

}  // namespace detail

double energy_tilde(const IndicatorField& u_omega, const Partition& p, double tau) {
  require_tau(tau, "energy_tilde");
  require_same_spec(u_omega.spec(), p.spec(), "energy_tilde");
  const auto& spec = p.spec();
  const std::size_t cells = spec.cells();
  auto terms = detail::half_step_terms(p, tau);
  auto omega = u_omega.values();

  std::vector<double> root_s(cells);
  std::vector<double> outer(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    root_s[c] = std::sqrt(terms.s[c]);
    outer[c] = omega[c] ? 0.0 : root_s[c];
  }
  gaussian_convolve(spec, outer, outer, tau / 2);

  double acc = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (!omega[c]) continue;
    acc += terms.s[c] - terms.sum_sq[c] - root_s[c] * outer[c];
  }
  return std::sqrt(std::numbers::pi / tau) * acc * spec.cell_volume();
}

namespace {

double ratio(const IndicatorField& u, double per) {
  const double vol = volume(u);
  if (u.spec().dim() == 2) return 4.0 * std::numbers::pi * vol / (per * per);
  return 36.0 * std::numbers::pi * vol * vol / (per * per * per);
}

}  // namespace

double isoperimetric_ratio(const IndicatorField& u, double tau) {
  if (u.count() == 0) throw Error("isoperimetric_ratio: empty region");
  return ratio(u, perimeter_estimate(u, tau));
}

double perimeter_extrapolated(const IndicatorField& u, double tau) {
  return 2.0 * perimeter_estimate(u, tau / 2) - perimeter_estimate(u, tau);
}

double isoperimetric_ratio_extrapolated(const IndicatorField& u, double tau) {
  if (u.count() == 0) throw Error("isoperimetric_ratio: empty region");
  return ratio(u, perimeter_extrapolated(u, tau));
}

double averaged_energy(std::span<const double> trace, int M, int k) {
  if (M < 1 || k < M || static_cast<std::size_t>(k) > trace.size())
    throw Error("averaged_energy: need 1 <= M <= k <= trace length");
  double acc = 0.0;
  for (int j = k - M; j < k; ++j) acc += trace[j];
  return acc / M;
}

EnergyReport evaluate(const IndicatorField& u_omega, const Partition& p, double tau) {
  EnergyReport r;
  r.e_tilde = energy_tilde(u_omega, p, tau);
  r.e_hat = energy_hat(p, tau);
  r.per_omega = perimeter_estimate(u_omega, tau);
  r.iso_ratio = isoperimetric_ratio(u_omega, tau);
  return r;
}

}  // namespace fencelab
