#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fencelab/config.hpp"
#include "fencelab/io.hpp"

namespace fencelab {

struct RunOutcome {
  SolveResult result;
  io::Metrics metrics;
  std::vector<std::filesystem::path> snapshots;
  std::vector<std::filesystem::path> images;
};

/// Rasterizes the shape, solves, and writes config.json, trace.csv,
/// metrics.json, snap_*.fld label snapshots and (optionally) PPM renders
/// into cfg.out, which must exist.
RunOutcome run_experiment(const RunConfig& cfg);

/// Renders each FLD file to PPM inside `out_dir`; returns the written paths.
std::vector<std::filesystem::path> render_files(const std::vector<std::filesystem::path>& fields,
                                                const std::filesystem::path& out_dir, double tau_render = 0.0);

struct BenchRow {
  std::string method;
  int n_partitions = 0;
  int iterations = 0;
  double wall_seconds = 0.0;
  double final_e_tilde = 0.0;
  double iso_ratio = 0.0;
};

/// Solves every configuration (no files written) and reports one row each.
std::vector<BenchRow> bench(const std::vector<RunConfig>& matrix);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace fencelab
