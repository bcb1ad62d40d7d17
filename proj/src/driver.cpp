#include "fencelab/driver.hpp"

#include <chrono>
#include <cstdio>

#include "fencelab/energy.hpp"

namespace fencelab {

namespace fs = std::filesystem;

namespace {

std::string snapshot_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%04d.fld", k);
  return buf;
}

bool wants_snapshot(int every, int k) {
  if (every > 0) return k % every == 0;
  return k == 0 || k == 5 || k == 10;
}

std::string grid_label(const GridSpec& g) {
  std::string s = std::to_string(g.n_axis());
  for (int a = 1; a < g.dim(); ++a) s += "x" + std::to_string(g.n_axis());
  return s;
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg) {
  cfg.validate(true);
  const GridSpec grid = cfg.grid();
  const IndicatorField u0 = rasterize(cfg.shape, grid);
  SolverConfig scfg = cfg.solver_config();

  RunOutcome outcome;
  io::write_text(cfg.out / "config.json", cfg.to_json().dump(2) + "\n");

  int last_written = -1;
  scfg.observer = [&](const IterationRecord& r, const IndicatorField&, const Partition& part) {
    if (!wants_snapshot(cfg.snapshot_every, r.k)) return;
    auto path = cfg.out / snapshot_name(r.k);
    io::write_fld(path, grid, io::label_bytes(part));
    outcome.snapshots.push_back(path);
    last_written = r.k;
  };

  const auto start = std::chrono::steady_clock::now();
  outcome.result = solve(u0, scfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& res = outcome.result;
  const int final_k = res.trace.back().k;
  if (last_written != final_k) {
    auto path = cfg.out / snapshot_name(final_k);
    io::write_fld(path, grid, io::label_bytes(res.partition));
    outcome.snapshots.push_back(path);
  }

  io::write_text(cfg.out / "trace.csv", io::trace_csv(res.trace));

  auto& m = outcome.metrics;
  m.method = to_string(scfg.method);
  m.grid = grid_label(grid);
  m.seed = scfg.seed;
  m.iterations = final_k;
  m.stop_reason = to_string(res.stop_reason);
  m.final_e_tilde = res.trace.back().e_tilde;
  m.final_e_hat = res.trace.back().e_hat;
  m.iso_ratio = isoperimetric_ratio(res.region, scfg.tau);
  m.volume_cells = res.region.count();
  m.wall_seconds = wall;
  io::write_text(cfg.out / "metrics.json", io::metrics_json(m));

  if (cfg.render) outcome.images = render_files(outcome.snapshots, cfg.out);
  return outcome;
}

std::vector<fs::path> render_files(const std::vector<fs::path>& fields, const fs::path& out_dir, double tau_render) {
  if (!fs::is_directory(out_dir)) throw Error("output directory '" + out_dir.string() + "' does not exist");
  std::vector<fs::path> written;
  for (const auto& f : fields) {
    const auto field = io::read_fld(f);
    const auto images = io::render_field(field, tau_render);
    const std::string stem = f.stem().string();
    if (images.size() == 1) {
      written.push_back(out_dir / (stem + ".ppm"));
      io::write_ppm(written.back(), images[0]);
    } else {
      static const char* axes[] = {"x", "y", "z"};
      for (std::size_t a = 0; a < images.size(); ++a) {
        written.push_back(out_dir / (stem + "_" + axes[a] + ".ppm"));
        io::write_ppm(written.back(), images[a]);
      }
    }
  }
  return written;
}

std::vector<BenchRow> bench(const std::vector<RunConfig>& matrix) {
  if (matrix.empty()) throw Error("bench: empty configuration matrix");
  std::vector<BenchRow> rows;
  for (const auto& cfg : matrix) {
    cfg.validate(false);
    const IndicatorField u0 = rasterize(cfg.shape, cfg.grid());
    const SolverConfig scfg = cfg.solver_config();
    const auto start = std::chrono::steady_clock::now();
    const SolveResult res = solve(u0, scfg);
    BenchRow row;
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.method = to_string(scfg.method);
    row.n_partitions = static_cast<int>(scfg.c.size());
    row.iterations = res.trace.back().k;
    row.final_e_tilde = res.trace.back().e_tilde;
    row.iso_ratio = isoperimetric_ratio(res.region, scfg.tau);
    rows.push_back(row);
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string s = "method,n_partitions,iterations,wall_seconds,final_e_tilde,iso_ratio\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.6f,%.12g,%.12g\n", r.method.c_str(), r.n_partitions, r.iterations,
                  r.wall_seconds, r.final_e_tilde, r.iso_ratio);
    s += buf;
  }
  return s;
}

}  // namespace fencelab
