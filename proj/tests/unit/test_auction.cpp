#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <numbers>
#include <random>

#include "fencelab/auction.hpp"
#include "fencelab/energy.hpp"
#include "fencelab/shapes.hpp"
#include "fencelab/spectral.hpp"
#include "oracles.hpp"

using namespace fencelab;

namespace {

IndicatorField block(const GridSpec& g, int i0, int j0, int rows, int cols) {
  std::vector<std::size_t> cells;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) cells.push_back(g.ravel({i0 + i, j0 + j, 0}));
  return IndicatorField::from_cells(g, cells);
}

CoefficientField coefficients_from(const GridSpec& g, const std::vector<std::size_t>& cells,
                                   const std::vector<std::vector<double>>& a) {
  CoefficientField cf{g, {}};
  for (const auto& ai : a) {
    ScalarField f(g);
    for (std::size_t k = 0; k < cells.size(); ++k) f[cells[k]] = ai[k];
    cf.a.push_back(std::move(f));
  }
  return cf;
}

/// Warm-started epsilon scaling down to eps_floor, as inside auction_dynamics.
MembershipResult scaled_auction(const VolumeTargets& t, const CoefficientField& cf, const IndicatorField& support,
                                const AuctionParams& params, AuctionStats* stats = nullptr) {
  PriceVector prices(t.size(), 0.0);
  MembershipResult r;
  for (double eps = params.eps0; eps >= params.eps_floor(static_cast<int>(t.size())); eps /= params.alpha) {
    r = membership_auction(eps, t, cf, prices, support, stats);
    prices = r.prices;
  }
  return r;
}

}  // namespace

TEST_CASE("volume targets") {
  CHECK(volume_targets(std::vector<double>{0.5, 0.5}, 100) == VolumeTargets{50, 50});
  CHECK(volume_targets(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, 100) == VolumeTargets{34, 33, 33});
  CHECK(volume_targets(std::vector<double>{1.0 / 6, 1.0 / 3, 1.0 / 2}, 120) == VolumeTargets{20, 40, 60});
  CHECK_THROWS_AS(volume_targets(std::vector<double>{0.5, 0.5}, 1), Error);
  CHECK_THROWS_AS(volume_targets(std::vector<double>{0.6, 0.5}, 10), Error);
  CHECK_THROWS_AS(volume_targets(std::vector<double>{1.0, 0.0}, 10), Error);

  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng() % 6);
    std::vector<double> c(n);
    double s = 0.0;
    for (auto& x : c) s += (x = 0.01 + std::uniform_real_distribution<double>(0, 1)(rng));
    for (auto& x : c) x /= s;
    double check = 0.0;
    for (double x : c) check += x;
    if (std::abs(check - 1.0) > 1e-12) continue;
    const std::size_t cells = n + rng() % 1000;
    auto v = volume_targets(c, cells);
    std::size_t total = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v[i] >= 1);
      CHECK(std::abs(static_cast<double>(v[i]) - c[i] * cells) < 1.0 + 1e-9);
      total += v[i];
    }
    CHECK(total == cells);
  }
}

TEST_CASE("random partition") {
  GridSpec g(2, 16);
  auto support = block(g, 2, 2, 10, 10);
  auto one = random_partition(support, VolumeTargets{100}, 5);
  CHECK(one.phase(0) == support);

  auto a = random_partition(support, VolumeTargets{50, 50}, 7);
  auto b = random_partition(support, VolumeTargets{50, 50}, 7);
  auto c = random_partition(support, VolumeTargets{50, 50}, 8);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.counts() == std::vector<std::size_t>{50, 50});
  CHECK(c.counts() == std::vector<std::size_t>{50, 50});
  CHECK_THROWS_AS(random_partition(support, VolumeTargets{50, 49}, 1), Error);
}

TEST_CASE("coefficients") {
  GridSpec g(2, 32);
  const double tau = 0.1;
  auto support = block(g, 4, 4, 12, 12);

  std::vector<std::int16_t> labels(g.cells(), -1);
  for (auto c : support.active_cells()) labels[c] = 0;
  auto cf = compute_coefficients(Partition(support, 2, labels), tau);
  auto g1 = gaussian_convolve(support, tau);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    CHECK(cf.a[0][c] == 1.0);
    CHECK(cf.a[1][c] == doctest::Approx(1.0 - g1[c]).epsilon(1e-12));
  }

  auto full = IndicatorField::full(g);
  auto p = random_partition(full, volume_targets(std::vector<double>{0.5, 0.5}, full.count()), 3);
  auto cf2 = compute_coefficients(p, tau);
  for (std::size_t c = 0; c < g.cells(); ++c) CHECK(std::abs(cf2.a[0][c] + cf2.a[1][c] - 1.0) <= 1e-10);
}

TEST_CASE("coefficients match the direct-sum oracle") {
  GridSpec g(2, 8);
  std::vector<std::size_t> cells{g.ravel({3, 3, 0}), g.ravel({3, 4, 0}), g.ravel({4, 3, 0}), g.ravel({4, 4, 0})};
  auto support = IndicatorField::from_cells(g, cells);
  std::vector<std::int16_t> labels(g.cells(), -1);
  labels[cells[0]] = 0;
  labels[cells[1]] = 1;
  labels[cells[2]] = 1;
  labels[cells[3]] = 0;
  Partition p(support, 2, labels);
  const double tau = 0.4;
  auto cf = compute_coefficients(p, tau);
  for (int i = 0; i < 2; ++i) {
    std::vector<double> other(g.cells(), 0.0);
    for (std::size_t c = 0; c < other.size(); ++c) other[c] = labels[c] == 1 - i;
    auto psi = oracle::direct_convolve(g, other, tau);
    for (std::size_t c = 0; c < other.size(); ++c) CHECK(cf.a[i][c] == doctest::Approx(1.0 - psi[c]).epsilon(1e-10));
  }
}

TEST_CASE("membership auction: single phase") {
  GridSpec g(2, 8);
  auto support = block(g, 1, 1, 3, 3);
  auto cells = support.active_cells();
  std::vector<double> a(cells.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = 0.1 * static_cast<double>(k) - 0.3;
  auto cf = coefficients_from(g, cells, {a});
  auto r = membership_auction(1e-3, VolumeTargets{cells.size()}, cf, PriceVector{0.0}, support);
  CHECK(r.partition.phase(0) == support);
  CHECK(r.prices[0] == doctest::Approx(-0.3 + 1e-3));
}

TEST_CASE("membership auction: four-cell instance") {
  GridSpec g(2, 8);
  auto support = block(g, 2, 2, 1, 4);
  auto cells = support.active_cells();
  auto cf = coefficients_from(g, cells, {{0.9, 0.8, 0.1, 0.2}, {0.1, 0.2, 0.9, 0.8}});
  auto r = membership_auction(1e-3, VolumeTargets{2, 2}, cf, PriceVector{0.0, 0.0}, support);
  CHECK(r.partition.label(cells[0]) == 0);
  CHECK(r.partition.label(cells[1]) == 0);
  CHECK(r.partition.label(cells[2]) == 1);
  CHECK(r.partition.label(cells[3]) == 1);
  double best = -1e9;
  oracle::for_each_assignment(4, {2, 2}, [&](const std::vector<int>& lab) {
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += cf.a[lab[k]][cells[k]];
    best = std::max(best, v);
  });
  CHECK(assignment_value(r.partition, cf) == doctest::Approx(3.4).epsilon(1e-12));
  CHECK(best == doctest::Approx(3.4).epsilon(1e-12));
}

TEST_CASE("membership auction: epsilon complementary slackness and instrumented counts") {
  GridSpec g(2, 16);
  auto support = block(g, 3, 3, 8, 9);
  auto cells = support.active_cells();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<std::vector<double>> a(3, std::vector<double>(cells.size()));
  for (auto& ai : a)
    for (auto& x : ai) x = d(rng);
  auto cf = coefficients_from(g, cells, a);
  VolumeTargets t{20, 30, 22};
  AuctionStats stats;
  stats.check_invariants = true;
  const double eps = 1e-4;
  auto r = membership_auction(eps, t, cf, PriceVector{0, 0, 0}, support, &stats);
  r.partition.require_counts(t);
  CHECK(stats.bids >= cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const int i = r.partition.label(cells[k]);
    double best = -1e300;
    for (int j = 0; j < 3; ++j) best = std::max(best, a[j][k] - r.prices[j]);
    CHECK(a[i][k] - r.prices[i] >= best - eps - 1e-12);
  }
}

TEST_CASE("membership auction: exhaustive optimum on random small instances") {
  GridSpec g(2, 8);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  AuctionParams params;
  int trials = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const int m = 6 + static_cast<int>(rng() % 7);  // 6..12 cells
    std::vector<std::size_t> all(g.cells());
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::size_t> chosen(all.begin(), all.begin() + m);
    auto support = IndicatorField::from_cells(g, chosen);
    auto cells = support.active_cells();
    std::vector<std::vector<double>> a(n, std::vector<double>(m));
    for (auto& ai : a)
      for (auto& x : ai) x = d(rng);
    auto cf = coefficients_from(g, cells, a);
    VolumeTargets targets(n, 1);
    for (int extra = m - n; extra > 0; --extra) ++targets[rng() % n];

    double best = -std::numeric_limits<double>::infinity();
    oracle::for_each_assignment(m, targets, [&](const std::vector<int>& lab) {
      double v = 0.0;
      for (int k = 0; k < m; ++k) v += a[lab[k]][k];
      best = std::max(best, v);
    });
    auto r = scaled_auction(targets, cf, support, params);
    r.partition.require_counts(targets);
    CHECK(assignment_value(r.partition, cf) >= best - n * params.eps_floor(n));
    ++trials;
  }
  CHECK(trials == 100);
}

TEST_CASE("membership auction: errors") {
  GridSpec g(2, 8);
  auto support = block(g, 0, 0, 2, 2);
  auto cf = coefficients_from(g, support.active_cells(), {{0, 0, 0, 0}, {0, 0, 0, 0}});
  CHECK_THROWS_AS(membership_auction(1e-3, VolumeTargets{2, 1}, cf, PriceVector{0, 0}, support), Error);
  CHECK_THROWS_AS(membership_auction(0.0, VolumeTargets{2, 2}, cf, PriceVector{0, 0}, support), Error);
  CHECK_THROWS_AS(membership_auction(1e-3, VolumeTargets{4}, cf, PriceVector{0}, support), Error);
}

TEST_CASE("auction dynamics: single phase returns the support") {
  GridSpec g(2, 16);
  auto support = block(g, 2, 2, 5, 7);
  AuctionStats stats;
  auto p = auction_dynamics(support, std::vector<double>{1.0}, 0.1, AuctionParams{}, 3, &stats);
  CHECK(p.phase(0) == support);
  CHECK(stats.outer_steps == 1);
}

TEST_CASE("auction dynamics: 2x4 block") {
  GridSpec g(2, 8);
  auto support = block(g, 3, 2, 2, 4);
  auto cells = support.active_cells();
  const double tau = g.dx() * g.dx();
  double best = std::numeric_limits<double>::infinity();
  int best_mask = -1;
  oracle::for_each_assignment(8, {4, 4}, [&](const std::vector<int>& lab) {
    std::vector<std::int16_t> labels(g.cells(), -1);
    int mask = 0;
    for (int k = 0; k < 8; ++k) {
      labels[cells[k]] = static_cast<std::int16_t>(lab[k]);
      mask |= (lab[k] == lab[0]) << k;
    }
    const double e = energy_hat(Partition(support, 2, labels), tau);
    if (e < best - 1e-14) {
      best = e;
      best_mask = mask;
    }
  });
  CHECK(best_mask == 0x33);  // columns {0,1} versus {2,3}: the vertical midline

  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto p = auction_dynamics(support, std::vector<double>{0.5, 0.5}, tau, AuctionParams{}, seed);
    p.require_counts(VolumeTargets{4, 4});
    const double e = energy_hat(p, tau);
    CHECK(e >= best - 1e-12);
    hits += std::abs(e - best) <= 1e-12 * best;
  }
  MESSAGE("2x4 block: " << hits << "/20 single runs reach the minimum");
  CHECK(hits > 0);
}

TEST_CASE("auction dynamics: disc bisection") {
  GridSpec g(2, 256);
  auto s = make_shape(ShapeKind::disc);
  s.radius = std::numbers::pi / 2;
  auto support = rasterize(s, g);
  const double tau = 2 * g.dx();
  auto p = auction_dynamics(support, std::vector<double>{0.5, 0.5}, tau, AuctionParams{}, 1);
  p.require_counts(volume_targets(std::vector<double>{0.5, 0.5}, support.count()));
  const double e = energy_hat(p, tau);
  CHECK(std::abs(e - 2 * std::numbers::pi) / (2 * std::numbers::pi) <= 0.10);

  // Centroids reflect through the disc centre.
  std::array<std::array<double, 2>, 2> centroid{};
  for (auto c : support.active_cells()) {
    auto ij = g.unravel(c);
    const int l = p.label(c);
    centroid[l][0] += g.coord(ij[0]);
    centroid[l][1] += g.coord(ij[1]);
  }
  for (int l = 0; l < 2; ++l)
    for (auto& v : centroid[l]) v /= static_cast<double>(p.counts()[l]);
  CHECK(std::hypot(centroid[0][0] + centroid[1][0], centroid[0][1] + centroid[1][1]) <= 2 * g.dx());
}

TEST_CASE("auction dynamics: determinism and per-step counts") {
  GridSpec g(2, 64);
  auto s = make_shape(ShapeKind::disc);
  s.radius = 2.0;
  auto support = rasterize(s, g);
  std::vector<double> c{0.2, 0.3, 0.5};
  AuctionStats stats;
  stats.check_invariants = true;
  auto a = auction_dynamics(support, c, 2 * g.dx(), AuctionParams{}, 42, &stats);
  auto b = auction_dynamics(support, c, 2 * g.dx(), AuctionParams{}, 42);
  CHECK(a == b);
  CHECK(stats.outer_steps >= 1);
  a.require_counts(volume_targets(c, support.count()));
}

TEST_CASE("auction parameters") {
  CHECK_NOTHROW(AuctionParams{}.validate());
  CHECK_THROWS_AS((AuctionParams{0, 1e-7, 4, 0.1}).validate(), Error);
  CHECK_THROWS_AS((AuctionParams{10, 1e-7, 1.0, 0.1}).validate(), Error);
  CHECK_THROWS_AS((AuctionParams{10, 1.0, 4, 0.1}).validate(), Error);
  CHECK(AuctionParams{}.eps_floor(4) == doctest::Approx(2.5e-8));
}
