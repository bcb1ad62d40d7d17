#include <cstdio>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "fencelab/driver.hpp"

namespace {

using fencelab::RunConfig;

// Flags shared by `run` and `bench`; each maps onto a config key of the same name.
const std::vector<std::pair<std::string, std::string>> kSettingKeys = {
    {"method", "one, two or monotone"},
    {"grid", "Cells per axis: 256, 256x256 or 64x64x64"},
    {"shape", "flower, disc, ball, square, rectangle, triangle, pentagon or cube"},
    {"shape-seed", "Seed of the random pentagon"},
    {"c", "Volume proportions, e.g. 0.5,0.5"},
    {"tau", "Heat-kernel time; a number or a multiple of dx such as 2dx"},
    {"tau-prime", "Regulariser time of method two (default 0.5dx)"},
    {"lambda", "Regulariser weight of method two"},
    {"beta0", "Initial step length"},
    {"gamma", "Step-length decay factor"},
    {"beta-min", "Stop once the step length drops below this"},
    {"M", "Averaging window of the step-length controller"},
    {"r-tol", "Relative change that triggers a step-length decay"},
    {"p", "Auction repeats per iteration"},
    {"auction", "Auction parameters m,eps_min,alpha,eps0"},
    {"seed", "Run seed"},
    {"max-iterations", "Guard on outer iterations"},
    {"gamma-mono", "Step-length decay of the monotone method"},
    {"beta-floor", "Step length at which the monotone method re-checks the partition"},
    {"p-check", "Auction repeats of the monotone re-check"},
    {"snapshot-every", "Snapshot cadence in iterations (default: 0, 5, 10 and final)"},
};

struct SettingFlags {
  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::map<std::string, std::optional<std::string>> values;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "Parameter preset (paper-2d, paper-3d)");
    app->add_option("--config", config, "Flat JSON config file; flags override it");
    for (const auto& [key, help] : kSettingKeys) app->add_option("--" + key, values[key], help);
  }

  RunConfig build() const {
    // Precedence: preset, then the config file, then individual flags.
    RunConfig cfg = fencelab::make_preset(preset.value_or("paper-2d"));
    if (config) fencelab::apply_config_file(cfg, *config);
    if (auto it = values.find("shape"); it != values.end() && it->second)
      fencelab::apply_setting(cfg, "shape", *it->second);
    for (const auto& [key, value] : values)
      if (value && key != "shape") fencelab::apply_setting(cfg, key, *value);
    return cfg;
  }
};

int run_cmd(const SettingFlags& flags, const std::optional<std::string>& out, bool render) {
  RunConfig cfg = flags.build();
  if (out) cfg.out = *out;
  if (render) cfg.render = true;
  auto outcome = fencelab::run_experiment(cfg);
  const auto& m = outcome.metrics;
  std::printf("method=%s iterations=%d stop=%s e_tilde=%.6f iso_ratio=%.6f wall=%.2fs\n", m.method.c_str(),
              m.iterations, m.stop_reason.c_str(), m.final_e_tilde, m.iso_ratio, m.wall_seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Longest minimal length partitions by threshold and auction dynamics"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Solve one configuration and write its artefacts");
  SettingFlags run_flags;
  run_flags.attach(run);
  std::optional<std::string> run_out;
  bool run_render = false;
  run->add_option("--out", run_out, "Existing output directory")->required();
  run->add_flag("--render", run_render, "Also write PPM images of the snapshots");

  auto* render = app.add_subcommand("render", "Render FLD snapshots to PPM");
  std::vector<std::string> render_inputs;
  std::string render_out;
  double tau_render = 0.0;
  render->add_option("fields", render_inputs, "FLD files")->required();
  render->add_option("--out", render_out, "Existing output directory")->required();
  render->add_option("--tau-render", tau_render, "Smoothing time (default: dx)");

  auto* bench = app.add_subcommand("bench", "Time a matrix of configurations");
  SettingFlags bench_flags;
  bench_flags.attach(bench);
  std::vector<std::string> bench_methods;
  std::vector<std::string> bench_cs;
  std::optional<std::string> bench_out;
  bench->add_option("--methods", bench_methods, "Methods to run (repeatable, default: the --method value)");
  bench->add_option("--c-list", bench_cs, "Proportion vectors to run, e.g. 0.5,0.5 (repeatable)");
  bench->add_option("--csv", bench_out, "Write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_cmd(run_flags, run_out, run_render);
    if (*render) {
      std::vector<std::filesystem::path> in(render_inputs.begin(), render_inputs.end());
      for (const auto& p : fencelab::render_files(in, render_out, tau_render)) std::printf("%s\n", p.c_str());
      return 0;
    }
    if (*bench) {
      const RunConfig base = bench_flags.build();
      std::vector<RunConfig> matrix;
      auto methods = bench_methods.empty() ? std::vector<std::string>{fencelab::to_string(base.solver.method)}
                                           : bench_methods;
      auto cs = bench_cs;
      if (cs.empty()) cs.push_back("");
      for (const auto& c : cs) {
        for (const auto& method : methods) {
          RunConfig cfg = base;
          fencelab::apply_setting(cfg, "method", method);
          if (!c.empty()) fencelab::apply_setting(cfg, "c", c);
          matrix.push_back(cfg);
        }
      }
      const std::string csv = fencelab::bench_csv(fencelab::bench(matrix));
      if (bench_out) {
        fencelab::io::write_text(*bench_out, csv);
      } else {
        std::cout << csv;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fencelab: %s\n", e.what());
    return 1;
  }
  return 0;
}
