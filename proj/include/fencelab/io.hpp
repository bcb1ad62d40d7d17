#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "fencelab/fields.hpp"
#include "fencelab/solver.hpp"

namespace fencelab::io {

namespace fs = std::filesystem;

/// Contents of an FLD file: a JSON header line followed by raw
/// little-endian values in canonical cell order.
struct FieldFile {
  GridSpec spec;
  std::string dtype;  // "u8" or "f64"
  std::vector<std::uint8_t> u8;
  std::vector<double> f64;
};

void write_fld(const fs::path& path, const GridSpec& spec, std::span<const std::uint8_t> values);
void write_fld(const fs::path& path, const ScalarField& f);
void write_fld(const fs::path& path, const IndicatorField& f);
FieldFile read_fld(const fs::path& path);

/// Label snapshot: 0 outside the region, i + 1 for phase i.
std::vector<std::uint8_t> label_bytes(const Partition& p);

/// Header exactly `iteration,beta,e_tilde,e_hat,changed_cells,adm_runs`;
/// reals with 12 significant digits.
std::string trace_csv(const std::vector<IterationRecord>& trace);
void write_text(const fs::path& path, const std::string& text);

struct Metrics {
  std::string method;
  std::string grid;
  std::uint64_t seed = 0;
  int iterations = 0;
  std::string stop_reason;
  double final_e_tilde = 0.0;
  double final_e_hat = 0.0;
  double iso_ratio = 0.0;
  std::size_t volume_cells = 0;
  double wall_seconds = 0.0;
};
std::string metrics_json(const Metrics& m);

/// Binary P6 image.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
};
void write_ppm(const fs::path& path, const Image& img);
Image read_ppm(const fs::path& path);

/// Palette colour of phase i (background for i < 0).
std::array<std::uint8_t, 3> phase_color(int i);

/// Renders a 2D label field: each phase is blended over the background with
/// alpha given by its smoothed indicator. tau_render <= 0 selects dx.
Image render_labels(const GridSpec& spec, std::span<const std::uint8_t> labels, double tau_render = 0.0);

/// Renders an FLD snapshot. 2D gives one image; 3D gives the three
/// axis-aligned mid-slices (normal x, y, z) of the 3D-smoothed field.
std::vector<Image> render_field(const FieldFile& f, double tau_render = 0.0);

}  // namespace fencelab::io
