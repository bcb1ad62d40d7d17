#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fencelab/auction.hpp"
#include "fencelab/fields.hpp"

namespace fencelab {

enum class Method { one, two, monotone };
enum class StopReason { beta_exhausted, region_fixed_point, monotone_accept, max_iterations };

std::string to_string(Method m);
std::string to_string(StopReason r);
Method parse_method(const std::string& s);

struct IterationRecord {
  int k = 0;
  double e_tilde = 0.0;
  double e_hat = 0.0;
  double beta = 0.0;
  std::size_t changed_cells = 0;
  int adm_runs = 0;
  std::size_t region_count = 0;
};

struct SolverConfig {
  Method method = Method::one;
  double tau = 0.0;        // must be set; presets use 2 dx
  double tau_prime = 0.0;  // method two; presets use dx / 2
  double lambda = 10.0;    // method two
  std::vector<double> c{0.5, 0.5};
  double beta0 = 1.0;
  double gamma = 0.5;
  double beta_min = 0.05;
  int M = 5;
  double r_tol = 1e-4;
  int p = 5;  // auction repeats per iteration (methods one and monotone)
  AuctionParams auction;
  std::uint64_t seed = 1;

  // Monotone method schedule.
  double gamma_mono = 0.5;
  double beta_floor = 1.0 / 64.0;
  int p_check = 10;

  /// Guard on outer iterations (accepted steps for the monotone method).
  int max_iterations = 400;

  /// Called after every recorded iteration, in order.
  std::function<void(const IterationRecord&, const IndicatorField&, const Partition&)> observer;

  void validate() const;
};

struct SolveResult {
  IndicatorField region;
  Partition partition;
  std::vector<IterationRecord> trace;
  StopReason stop_reason = StopReason::max_iterations;
  int total_adm_runs = 0;
};

/// Runs auction_dynamics with seeds base_seed+1 .. base_seed+p (in parallel
/// when the thread budget allows) and keeps the candidate with the smallest
/// energy_tilde; ties go to the lower seed.
Partition best_of_p(const IndicatorField& support, const SolverConfig& cfg, std::uint64_t base_seed, int p);
inline Partition best_of_p(const IndicatorField& support, const SolverConfig& cfg, std::uint64_t base_seed) {
  return best_of_p(support, cfg, base_seed, cfg.p);
}

/// Step-length decay: gamma * beta once k > M and the relative change between
/// the last two M-window averages of `history` drops below r_tol.
double beta_controller(std::span<const double> history, int M, double r_tol, double beta, double gamma, int k);

SolveResult method_one(const IndicatorField& u0, const SolverConfig& cfg);
SolveResult method_two(const IndicatorField& u0, const SolverConfig& cfg);
SolveResult method_monotone(const IndicatorField& u0, const SolverConfig& cfg);
SolveResult solve(const IndicatorField& u0, const SolverConfig& cfg);

/// Worker threads allowed for independent work; FENCELAB_THREADS caps it.
int thread_budget();

}  // namespace fencelab
