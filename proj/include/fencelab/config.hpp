#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fencelab/fields.hpp"
#include "fencelab/shapes.hpp"
#include "fencelab/solver.hpp"

namespace fencelab {

/// Everything needed for one CLI run. Lengths tau and tau-prime are kept as
/// text so they can be given relative to the grid spacing ("2dx").
struct RunConfig {
  std::string preset = "paper-2d";
  SolverConfig solver;
  int dim = 2;
  int n_axis = 256;
  std::string tau = "2dx";
  std::string tau_prime = "0.5dx";
  ShapeSpec shape;
  std::filesystem::path out;
  int snapshot_every = 0;  // 0: iterations {0, 5, 10, final}
  bool render = false;

  GridSpec grid() const { return GridSpec(dim, n_axis); }
  /// Solver configuration with lengths resolved on the grid.
  SolverConfig solver_config() const;
  /// Throws on invalid settings (including a missing output directory when
  /// `need_out` is set).
  void validate(bool need_out = true) const;
  nlohmann::ordered_json to_json() const;
};

/// Named presets: paper-2d (256^2) and paper-3d (128^3).
RunConfig make_preset(const std::string& name);

/// Applies one flat setting; keys match the CLI flag names without dashes
/// ("tau-prime", "beta-min", "auction", ...).
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Applies a flat JSON object of settings (a "preset" key is applied first).
void apply_json(RunConfig& cfg, const nlohmann::json& j);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
RunConfig load_config_file(const std::filesystem::path& path);

/// "2dx" -> 2 * dx, "0.01" -> 0.01.
double parse_length(const std::string& s, double dx);

}  // namespace fencelab
