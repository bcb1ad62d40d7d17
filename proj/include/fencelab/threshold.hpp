#pragma once

#include "fencelab/fields.hpp"

namespace fencelab {

/// Candidate add/remove sets of a region update and the subsets applied.
struct UpdateSets {
  IndicatorField add;           // A: proposed region minus current region
  IndicatorField remove;        // B: current region minus proposed region
  IndicatorField add_applied;   // cells of A actually added
  IndicatorField remove_applied;
  std::size_t k_cells = 0;      // |add_applied| == |remove_applied|
};

/// Linearisation coefficient of energy_tilde in the region indicator,
/// evaluated at (u_omega, p).
ScalarField dominant_function_1(const IndicatorField& u_omega, const Partition& p, double tau);

/// dominant_function_1 plus lambda * G_{tau_prime} * (sum_i u_i).
ScalarField dominant_function_2(const IndicatorField& u_omega, const Partition& p, double tau, double lambda,
                                double tau_prime);

/// The k_cells cells with largest phi; ties go to the lower cell index.
IndicatorField threshold_volume(const ScalarField& phi, std::size_t k_cells);

struct PartialUpdate {
  IndicatorField region;
  UpdateSets sets;
};

/// Moves round(beta * |A|) cells: the highest-phi cells of A are added and
/// the same number of lowest-phi cells of B removed, so the count is kept.
PartialUpdate partial_update(const IndicatorField& u_prev, const IndicatorField& u_process, const ScalarField& phi,
                             double beta);

}  // namespace fencelab
