#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fencelab/fields.hpp"

namespace fencelab {

/// Stopping parameters (m, eps_min, alpha, eps0) of auction dynamics.
struct AuctionParams {
  int m = 1000;          // maximum outer steps
  double eps_min = 1e-7; // auction error tolerance
  double alpha = 4.0;    // epsilon scaling divisor
  double eps0 = 0.1;     // initial epsilon

  void validate() const;
  /// Terminal epsilon for n phases: eps_min / n.
  double eps_floor(int n_phases) const { return eps_min / n_phases; }
};

using PriceVector = std::vector<double>;
using VolumeTargets = std::vector<std::size_t>;

/// Per-phase assignment coefficients a_i = 1 - sum_{j != i} G_tau * u_j.
struct CoefficientField {
  GridSpec spec;
  std::vector<ScalarField> a;
  int n() const { return static_cast<int>(a.size()); }
};

/// Counters filled in by the auction routines. With `check_invariants` set,
/// phase counts are re-verified after every bid and a violation throws.
struct AuctionStats {
  bool check_invariants = false;
  std::size_t bids = 0;
  std::size_t evictions = 0;
  std::size_t sweeps = 0;
  std::size_t membership_calls = 0;
  std::size_t outer_steps = 0;
};

/// SplitMix64 generator; the only randomness source in the library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Integer cell targets by largest remainder; leftover cells go to the
/// largest fractional parts, ties to the lower phase index.
VolumeTargets volume_targets(std::span<const double> c, std::size_t active_cells);

/// Seeded Fisher-Yates shuffle of the support cells, cut into consecutive
/// blocks of the target sizes.
Partition random_partition(const IndicatorField& support, const VolumeTargets& targets, std::uint64_t seed);

CoefficientField compute_coefficients(const Partition& p, double tau);

struct MembershipResult {
  Partition partition;
  PriceVector prices;
};

/// One membership auction at fixed epsilon, starting from every support cell
/// unassigned and prices `p0`.
MembershipResult membership_auction(double eps, const VolumeTargets& targets, const CoefficientField& coeff,
                                    const PriceVector& p0, const IndicatorField& support,
                                    AuctionStats* stats = nullptr);

/// Volume-constrained heat-content minimisation over partitions of `support`.
Partition auction_dynamics(const IndicatorField& support, std::span<const double> c, double tau,
                           const AuctionParams& params, std::uint64_t seed, AuctionStats* stats = nullptr);

/// sum_x a_{label(x)}(x) over the support.
double assignment_value(const Partition& p, const CoefficientField& coeff);

}  // namespace fencelab
