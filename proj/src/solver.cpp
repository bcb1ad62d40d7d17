#include "fencelab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "fencelab/energy.hpp"
#include "fencelab/threshold.hpp"

namespace fencelab {

std::string to_string(Method m) {
  switch (m) {
    case Method::one: return "one";
    case Method::two: return "two";
    case Method::monotone: return "monotone";
  }
  return "?";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::beta_exhausted: return "beta_exhausted";
    case StopReason::region_fixed_point: return "region_fixed_point";
    case StopReason::monotone_accept: return "monotone_accept";
    case StopReason::max_iterations: return "max_iterations";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "one" || s == "1") return Method::one;
  if (s == "two" || s == "2") return Method::two;
  if (s == "monotone") return Method::monotone;
  throw Error("unknown method '" + s + "' (expected one, two or monotone)");
}

void SolverConfig::validate() const {
  if (!(tau > 0.0)) throw Error("config: tau must be positive");
  if (method == Method::two) {
    if (!(tau_prime > 0.0)) throw Error("config: tau_prime must be positive");
    if (!(lambda >= 0.0)) throw Error("config: lambda must be nonnegative");
  }
  if (c.empty()) throw Error("config: no proportions");
  double total = 0.0;
  for (double ci : c) {
    if (!(ci > 0.0)) throw Error("config: proportions must be positive");
    total += ci;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error("config: proportions must sum to 1");
  if (!(beta0 >= 0.0 && beta0 <= 1.0)) throw Error("config: beta0 must lie in [0, 1]");
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error("config: gamma must lie in (0, 1)");
  if (!(beta_min > 0.0 && beta_min < 1.0)) throw Error("config: beta_min must lie in (0, 1)");
  if (M < 1) throw Error("config: M must be >= 1");
  if (!(r_tol > 0.0)) throw Error("config: r_tol must be positive");
  if (p < 1) throw Error("config: p must be >= 1");
  if (!(gamma_mono > 0.0 && gamma_mono < 1.0)) throw Error("config: gamma_mono must lie in (0, 1)");
  if (!(beta_floor > 0.0 && beta_floor <= 1.0)) throw Error("config: beta_floor must lie in (0, 1]");
  if (p_check < 1) throw Error("config: p_check must be >= 1");
  if (max_iterations < 0) throw Error("config: max_iterations must be >= 0");
  auction.validate();
}

int thread_budget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("FENCELAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return std::min(hw, cap);
  }
  return hw;
}

Partition best_of_p(const IndicatorField& support, const SolverConfig& cfg, std::uint64_t base_seed, int p) {
  if (p < 1) throw Error("best_of_p: p must be >= 1");
  std::vector<std::optional<Partition>> candidates(p);
  std::vector<double> energies(p);
  auto run = [&](int q) {
    candidates[q] = auction_dynamics(support, cfg.c, cfg.tau, cfg.auction, base_seed + 1 + q);
    energies[q] = energy_tilde(support, *candidates[q], cfg.tau);
  };

  const int workers = std::min(p, thread_budget());
  if (workers <= 1) {
    for (int q = 0; q < p; ++q) run(q);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int q = w; q < p; q += workers) run(q);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  int best = 0;
  for (int q = 1; q < p; ++q)
    if (energies[q] < energies[best]) best = q;
  return std::move(*candidates[best]);
}

double beta_controller(std::span<const double> history, int M, double r_tol, double beta, double gamma, int k) {
  if (k <= M) return beta;
  const int len = static_cast<int>(history.size());
  if (len < M + 1) throw Error("beta_controller: history shorter than M + 1");
  const double newer = averaged_energy(history, M, len);
  const double older = averaged_energy(history, M, len - 1);
  if (std::abs(newer - older) / std::abs(newer) < r_tol) return gamma * beta;
  return beta;
}

namespace {

class Run {
 public:
  Run(const IndicatorField& u0, const SolverConfig& cfg) : cfg_(cfg), volume_cells_(u0.count()) {
    cfg_.validate();
    if (u0.count() == 0) throw Error("solver: initial region is empty");
    targets_ = volume_targets(cfg_.c, volume_cells_);
    seed_cursor_ = cfg_.seed << 20;
  }

  /// Partition of `u` from `p` auction runs on fresh seeds.
  Partition partition(const IndicatorField& u, int p) {
    Partition part = best_of_p(u, cfg_, seed_cursor_, p);
    seed_cursor_ += static_cast<std::uint64_t>(p);
    adm_runs_ += p;
    total_adm_runs_ += p;
    return part;
  }

  IterationRecord record(int k, const IndicatorField& u, const Partition& part, double e_tilde, double beta,
                         std::size_t changed) {
    check_invariants(u, part);
    IterationRecord r;
    r.k = k;
    r.e_tilde = e_tilde;
    r.e_hat = energy_hat(part, cfg_.tau);
    r.beta = beta;
    r.changed_cells = changed;
    r.adm_runs = adm_runs_;
    r.region_count = u.count();
    adm_runs_ = 0;
    return r;
  }

  void emit(const IterationRecord& r, const IndicatorField& u, const Partition& part) {
    if (cfg_.observer) cfg_.observer(r, u, part);
  }

  const SolverConfig& cfg() const { return cfg_; }
  int total_adm_runs() const { return total_adm_runs_; }

 private:
  void check_invariants(const IndicatorField& u, const Partition& part) const {
    if (u.count() != volume_cells_) throw Error("solver invariant: region volume changed");
    if (!(part.support() == u)) throw Error("solver invariant: partition does not cover the region");
    part.require_counts(targets_);
  }

  SolverConfig cfg_;
  std::size_t volume_cells_;
  VolumeTargets targets_;
  std::uint64_t seed_cursor_ = 0;
  int adm_runs_ = 0;
  int total_adm_runs_ = 0;
};

/// Shared loop of the first and second methods.
SolveResult alternating(const IndicatorField& u0, const SolverConfig& config, bool regularised) {
  Run run(u0, config);
  const auto& cfg = run.cfg();
  const int p = regularised ? 1 : cfg.p;

  SolveResult res;
  IndicatorField u = u0;
  Partition part = run.partition(u, p);
  double e = energy_tilde(u, part, cfg.tau);
  std::vector<double> history{e};
  double beta = cfg.beta0;
  res.trace.push_back(run.record(0, u, part, e, beta, 0));
  run.emit(res.trace.back(), u, part);

  int k = 0;
  while (true) {
    if (!(beta > cfg.beta_min)) {
      res.stop_reason = StopReason::beta_exhausted;
      break;
    }
    if (k >= cfg.max_iterations) {
      res.stop_reason = StopReason::max_iterations;
      break;
    }
    ScalarField phi = regularised ? dominant_function_2(u, part, cfg.tau, cfg.lambda, cfg.tau_prime)
                                  : dominant_function_1(u, part, cfg.tau);
    IndicatorField proposal = threshold_volume(phi, u.count());
    PartialUpdate upd = partial_update(u, proposal, phi, beta);
    if (equal(upd.region, u)) {
      res.stop_reason = StopReason::region_fixed_point;
      break;
    }
    const std::size_t changed = upd.sets.add_applied.count() + upd.sets.remove_applied.count();
    u = std::move(upd.region);
    part = run.partition(u, p);
    e = energy_tilde(u, part, cfg.tau);
    history.push_back(e);
    const double used_beta = beta;
    beta = beta_controller(history, cfg.M, cfg.r_tol, beta, cfg.gamma, k);
    ++k;
    res.trace.push_back(run.record(k, u, part, e, used_beta, changed));
    run.emit(res.trace.back(), u, part);
  }
  res.region = std::move(u);
  res.partition = std::move(part);
  res.total_adm_runs = run.total_adm_runs();
  return res;
}

}  // namespace

SolveResult method_one(const IndicatorField& u0, const SolverConfig& cfg) { return alternating(u0, cfg, false); }

SolveResult method_two(const IndicatorField& u0, const SolverConfig& cfg) { return alternating(u0, cfg, true); }

SolveResult method_monotone(const IndicatorField& u0, const SolverConfig& config) {
  Run run(u0, config);
  const auto& cfg = run.cfg();

  struct State {
    IndicatorField u;
    Partition part;
    double e;
    double beta;
    std::size_t changed;
    int adm_runs;
  };
  std::vector<State> accepted;
  {
    Partition part = run.partition(u0, cfg.p);
    const double e = energy_tilde(u0, part, cfg.tau);
    auto rec = run.record(0, u0, part, e, 1.0, 0);
    accepted.push_back({u0, std::move(part), e, 1.0, 0, rec.adm_runs});
  }

  SolveResult res;
  int passes = 0;
  int spent = 0;  // auction runs since the last accepted state
  while (true) {
    if (passes++ >= cfg.max_iterations) {
      res.stop_reason = StopReason::max_iterations;
      break;
    }
    const State& top = accepted.back();
    ScalarField phi = dominant_function_1(top.u, top.part, cfg.tau);
    IndicatorField proposal = threshold_volume(phi, top.u.count());

    bool advanced = false;
    for (double beta = 1.0; beta >= cfg.beta_floor; beta *= cfg.gamma_mono) {
      PartialUpdate upd = partial_update(top.u, proposal, phi, beta);
      if (equal(upd.region, top.u)) continue;
      Partition part = run.partition(upd.region, cfg.p);
      spent += cfg.p;
      const double e = energy_tilde(upd.region, part, cfg.tau);
      if (e >= top.e) {
        const std::size_t changed = upd.sets.add_applied.count() + upd.sets.remove_applied.count();
        run.record(static_cast<int>(accepted.size()), upd.region, part, e, beta, changed);
        accepted.push_back({std::move(upd.region), std::move(part), e, beta, changed, spent});
        spent = 0;
        advanced = true;
        break;
      }
    }
    if (advanced) continue;

    // Step length exhausted: look for a shorter partition of the current region.
    State& cur = accepted.back();
    std::optional<Partition> better;
    double best_e = cur.e;
    for (int q = 0; q < cfg.p_check; ++q) {
      Partition cand = run.partition(cur.u, 1);
      spent += 1;
      const double e = energy_tilde(cur.u, cand, cfg.tau);
      if (e < best_e) {
        best_e = e;
        better = std::move(cand);
      }
    }
    if (!better) {
      res.stop_reason = StopReason::monotone_accept;
      break;
    }
    cur.part = std::move(*better);
    cur.e = best_e;
    if (accepted.size() >= 2 && cur.e < accepted[accepted.size() - 2].e) accepted.pop_back();
  }

  for (std::size_t k = 0; k < accepted.size(); ++k) {
    IterationRecord r;
    r.k = static_cast<int>(k);
    r.e_tilde = accepted[k].e;
    r.e_hat = energy_hat(accepted[k].part, cfg.tau);
    r.beta = accepted[k].beta;
    r.changed_cells = accepted[k].changed;
    r.adm_runs = accepted[k].adm_runs;
    r.region_count = accepted[k].u.count();
    res.trace.push_back(r);
    // Observers see the accepted path only, once it can no longer be reverted.
    run.emit(r, accepted[k].u, accepted[k].part);
  }
  res.region = accepted.back().u;
  res.partition = accepted.back().part;
  res.total_adm_runs = run.total_adm_runs();
  return res;
}

SolveResult solve(const IndicatorField& u0, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::one: return method_one(u0, cfg);
    case Method::two: return method_two(u0, cfg);
    case Method::monotone: return method_monotone(u0, cfg);
  }
  throw Error("unknown method");
}

}  // namespace fencelab
