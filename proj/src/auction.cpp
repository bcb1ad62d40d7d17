#include "fencelab/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fencelab/spectral.hpp"

namespace fencelab {

void AuctionParams::validate() const {
  if (m < 1) throw Error("auction: m must be >= 1");
  if (!(eps_min > 0.0)) throw Error("auction: eps_min must be positive");
  if (!(alpha > 1.0)) throw Error("auction: alpha must exceed 1");
  if (!(eps0 >= eps_min)) throw Error("auction: eps0 must be >= eps_min");
}

VolumeTargets volume_targets(std::span<const double> c, std::size_t active_cells) {
  const std::size_t n = c.size();
  if (n == 0) throw Error("volume_targets: no proportions given");
  double total = 0.0;
  for (double ci : c) {
    if (!(ci > 0.0)) throw Error("volume_targets: proportions must be positive");
    total += ci;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error("volume_targets: proportions must sum to 1");
  if (active_cells < n)
    throw Error("volume_targets: " + std::to_string(active_cells) + " cells cannot hold " + std::to_string(n) +
                " phases");

  VolumeTargets t(n);
  std::vector<double> frac(n);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = c[i] * static_cast<double>(active_cells);
    t[i] = static_cast<std::size_t>(std::floor(exact));
    frac[i] = exact - static_cast<double>(t[i]);
    assigned += t[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < active_cells; k = (k + 1) % n, ++assigned) ++t[order[k]];
  for (std::size_t i = 0; i < n; ++i) {
    if (t[i] > 0) continue;
    auto donor = std::max_element(t.begin(), t.end()) - t.begin();
    --t[donor];
    t[i] = 1;
  }
  return t;
}

Partition random_partition(const IndicatorField& support, const VolumeTargets& targets, std::uint64_t seed) {
  const std::size_t total = std::accumulate(targets.begin(), targets.end(), std::size_t{0});
  if (total != support.count()) throw Error("random_partition: targets do not sum to the support size");
  auto cells = support.active_cells();
  SplitMix64 rng(seed);
  for (std::size_t i = cells.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % i);
    std::swap(cells[i - 1], cells[j]);
  }
  std::vector<std::int16_t> labels(support.size(), -1);
  std::size_t pos = 0;
  for (std::size_t ph = 0; ph < targets.size(); ++ph)
    for (std::size_t k = 0; k < targets[ph]; ++k) labels[cells[pos++]] = static_cast<std::int16_t>(ph);
  return Partition(support, static_cast<int>(targets.size()), std::move(labels));
}

namespace {

/// Packed coefficients a[k * n + i] for the k-th support cell (canonical order).
struct PackedProblem {
  std::vector<std::size_t> cells;
  int n = 0;
  std::vector<double> a;
};

PackedProblem pack_coefficients(const Partition& p, double tau) {
  const auto& spec = p.spec();
  auto labels = p.labels();
  PackedProblem prob{p.support().active_cells(), p.n(), {}};
  const std::size_t m = prob.cells.size();
  const int n = p.n();
  prob.a.assign(m * n, 1.0);
  if (n == 1) return prob;  // no other phases: a_1 = 1

  std::vector<double> smoothed_support(labels.size());
  for (std::size_t c = 0; c < labels.size(); ++c) smoothed_support[c] = labels[c] >= 0 ? 1.0 : 0.0;
  gaussian_convolve(spec, smoothed_support, smoothed_support, tau);
  std::vector<double> buf(labels.size());
  for (int i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < labels.size(); ++c) buf[c] = labels[c] == i ? 1.0 : 0.0;
    gaussian_convolve(spec, buf, buf, tau);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t c = prob.cells[k];
      prob.a[k * n + i] = 1.0 - (smoothed_support[c] - buf[c]);
    }
  }
  return prob;
}

PackedProblem pack_coefficients(const CoefficientField& coeff, const IndicatorField& support) {
  require_same_spec(coeff.spec, support.spec(), "membership_auction");
  PackedProblem prob{support.active_cells(), coeff.n(), {}};
  const int n = coeff.n();
  prob.a.resize(prob.cells.size() * n);
  for (std::size_t k = 0; k < prob.cells.size(); ++k)
    for (int i = 0; i < n; ++i) prob.a[k * n + i] = coeff.a[i][prob.cells[k]];
  return prob;
}

struct Bid {
  double value;
  std::uint32_t cell;  // index into PackedProblem::cells
};
// Min-heap order on (bid, canonical cell order).
struct BidAbove {
  bool operator()(const Bid& x, const Bid& y) const {
    return x.value > y.value || (x.value == y.value && x.cell > y.cell);
  }
};

/// Runs one membership auction; `labels` receives a phase per packed cell.
void run_membership(const PackedProblem& prob, double eps, const VolumeTargets& targets, PriceVector& prices,
                    std::vector<std::int16_t>& labels, AuctionStats* stats) {
  const std::size_t m = prob.cells.size();
  const int n = prob.n;
  labels.assign(m, -1);
  if (stats) ++stats->membership_calls;

  if (n == 1) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      labels[k] = 0;
      lo = std::min(lo, prob.a[k]);
    }
    if (m > 0) prices[0] = lo + eps;
    return;
  }

  std::vector<std::vector<Bid>> members(n);
  for (int i = 0; i < n; ++i) members[i].reserve(targets[i]);
  std::vector<std::uint32_t> unassigned(m);
  std::iota(unassigned.begin(), unassigned.end(), 0u);
  std::vector<std::uint32_t> evicted;
  const BidAbove order;

  while (!unassigned.empty()) {
    if (stats) ++stats->sweeps;
    evicted.clear();
    for (const std::uint32_t x : unassigned) {
      const double* ax = &prob.a[static_cast<std::size_t>(x) * n];
      double best = -std::numeric_limits<double>::infinity();
      double second = best;
      int i_star = -1;
      for (int i = 0; i < n; ++i) {
        const double v = ax[i] - prices[i];
        if (v > best) {
          second = best;
          best = v;
          i_star = i;
        } else if (v > second) {
          second = v;
        }
      }
      const double bid = prices[i_star] + eps + best - second;
      auto& heap = members[i_star];
      if (heap.size() == targets[i_star]) {
        std::pop_heap(heap.begin(), heap.end(), order);
        const std::uint32_t y = heap.back().cell;
        heap.pop_back();
        labels[y] = -1;
        evicted.push_back(y);
        heap.push_back({bid, x});
        std::push_heap(heap.begin(), heap.end(), order);
        labels[x] = static_cast<std::int16_t>(i_star);
        prices[i_star] = heap.front().value;
        if (stats) ++stats->evictions;
      } else {
        heap.push_back({bid, x});
        std::push_heap(heap.begin(), heap.end(), order);
        labels[x] = static_cast<std::int16_t>(i_star);
        if (heap.size() == targets[i_star]) prices[i_star] = heap.front().value;
      }
      if (stats) {
        ++stats->bids;
        if (stats->check_invariants) {
          std::size_t held = 0;
          for (int i = 0; i < n; ++i) {
            if (members[i].size() > targets[i]) throw Error("auction invariant: phase over target");
            held += members[i].size();
          }
          std::size_t open = 0;
          for (auto l : labels) open += l < 0;
          if (held + open != m) throw Error("auction invariant: cell count not conserved");
        }
      }
    }
    std::sort(evicted.begin(), evicted.end());
    unassigned.swap(evicted);
  }
}

Partition unpack(const IndicatorField& support, const PackedProblem& prob, const std::vector<std::int16_t>& packed) {
  std::vector<std::int16_t> labels(support.size(), -1);
  for (std::size_t k = 0; k < prob.cells.size(); ++k) labels[prob.cells[k]] = packed[k];
  return Partition(support, prob.n, std::move(labels));
}

void check_targets(const VolumeTargets& targets, std::size_t active) {
  if (targets.empty()) throw Error("auction: no phases");
  std::size_t total = 0;
  for (auto t : targets) {
    if (t == 0) throw Error("auction: every phase needs a positive target");
    total += t;
  }
  if (total != active) throw Error("auction: infeasible targets (sum " + std::to_string(total) + " vs " +
                                   std::to_string(active) + " support cells)");
}

}  // namespace

CoefficientField compute_coefficients(const Partition& p, double tau) {
  if (!(tau > 0.0)) throw Error("compute_coefficients: tau must be positive");
  const auto& spec = p.spec();
  auto labels = p.labels();
  CoefficientField out{spec, {}};
  ScalarField support_smoothed = gaussian_convolve(p.support(), tau);
  for (int i = 0; i < p.n(); ++i) {
    ScalarField a(spec, 1.0);
    if (p.n() > 1) {
      auto own = gaussian_convolve(p.phase(i), tau);
      for (std::size_t c = 0; c < labels.size(); ++c) a[c] = 1.0 - (support_smoothed[c] - own[c]);
    }
    out.a.push_back(std::move(a));
  }
  return out;
}

MembershipResult membership_auction(double eps, const VolumeTargets& targets, const CoefficientField& coeff,
                                    const PriceVector& p0, const IndicatorField& support, AuctionStats* stats) {
  if (!(eps > 0.0)) throw Error("membership_auction: eps must be positive");
  if (static_cast<int>(targets.size()) != coeff.n() || p0.size() != targets.size())
    throw Error("membership_auction: phase count mismatch");
  check_targets(targets, support.count());
  auto prob = pack_coefficients(coeff, support);
  PriceVector prices = p0;
  std::vector<std::int16_t> packed;
  run_membership(prob, eps, targets, prices, packed, stats);
  return {unpack(support, prob, packed), std::move(prices)};
}

Partition auction_dynamics(const IndicatorField& support, std::span<const double> c, double tau,
                           const AuctionParams& params, std::uint64_t seed, AuctionStats* stats) {
  params.validate();
  if (!(tau > 0.0)) throw Error("auction_dynamics: tau must be positive");
  if (support.count() == 0) throw Error("auction_dynamics: empty support");
  const auto targets = volume_targets(c, support.count());
  check_targets(targets, support.count());
  const int n = static_cast<int>(targets.size());
  const double eps_floor = params.eps_floor(n);

  Partition current = random_partition(support, targets, seed);
  std::vector<std::int16_t> packed;
  for (int step = 0; step < params.m; ++step) {
    auto prob = pack_coefficients(current, tau);
    PriceVector prices(n, 0.0);
    // The last auction of the epsilon-scaling loop defines the new partition.
    for (double eps = params.eps0; eps >= eps_floor; eps /= params.alpha)
      run_membership(prob, eps, targets, prices, packed, stats);
    Partition next = unpack(support, prob, packed);
    if (stats) {
      ++stats->outer_steps;
      next.require_counts(targets);
    }
    const bool converged = next == current;
    current = std::move(next);
    if (converged) break;
  }
  return current;
}

double assignment_value(const Partition& p, const CoefficientField& coeff) {
  require_same_spec(p.spec(), coeff.spec, "assignment_value");
  auto labels = p.labels();
  double v = 0.0;
  for (std::size_t c = 0; c < labels.size(); ++c)
    if (labels[c] >= 0) v += coeff.a[labels[c]][c];
  return v;
}

}  // namespace fencelab
