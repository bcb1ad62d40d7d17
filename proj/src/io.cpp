#include "fencelab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fencelab/spectral.hpp"

namespace fencelab::io {

namespace {

static_assert(std::endian::native == std::endian::little, "FLD payloads are written in native little-endian order");

std::string header_line(const GridSpec& spec, const char* dtype) {
  // Written by hand so the key order and number formatting are fixed.
  std::string dims, domain;
  for (int a = 0; a < spec.dim(); ++a) {
    if (a) {
      dims += ",";
      domain += ",";
    }
    dims += std::to_string(spec.n_axis());
    domain += "[-3.141592653589793,3.141592653589793]";
  }
  return "{\"dims\":[" + dims + "],\"dtype\":\"" + dtype + "\",\"order\":\"row-major\",\"domain\":[" + domain + "]}\n";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_payload(const fs::path& path, const std::string& header, const void* data, std::size_t bytes) {
  auto out = open_out(path);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_fld(const fs::path& path, const GridSpec& spec, std::span<const std::uint8_t> values) {
  if (values.size() != spec.cells()) throw Error("write_fld: value count does not match the grid");
  write_payload(path, header_line(spec, "u8"), values.data(), values.size());
}

void write_fld(const fs::path& path, const ScalarField& f) {
  write_payload(path, header_line(f.spec(), "f64"), f.values().data(), f.size() * sizeof(double));
}

void write_fld(const fs::path& path, const IndicatorField& f) { write_fld(path, f.spec(), f.values()); }

FieldFile read_fld(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string header;
  if (!std::getline(in, header)) throw Error("malformed FLD '" + path.string() + "': missing header");

  FieldFile f;
  try {
    auto j = nlohmann::json::parse(header);
    auto dims = j.at("dims").get<std::vector<int>>();
    f.dtype = j.at("dtype").get<std::string>();
    if (j.at("order").get<std::string>() != "row-major") throw Error("unsupported order");
    if (dims.empty() || !std::all_of(dims.begin(), dims.end(), [&](int d) { return d == dims[0]; }))
      throw Error("dims must be equal");
    f.spec = GridSpec(static_cast<int>(dims.size()), dims[0]);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed FLD '" + path.string() + "': " + e.what());
  } catch (const Error& e) {
    throw Error("malformed FLD '" + path.string() + "': " + e.what());
  }

  const std::size_t cells = f.spec.cells();
  std::size_t bytes = 0;
  char* dst = nullptr;
  if (f.dtype == "u8") {
    f.u8.resize(cells);
    bytes = cells;
    dst = reinterpret_cast<char*>(f.u8.data());
  } else if (f.dtype == "f64") {
    f.f64.resize(cells);
    bytes = cells * sizeof(double);
    dst = reinterpret_cast<char*>(f.f64.data());
  } else {
    throw Error("malformed FLD '" + path.string() + "': unknown dtype '" + f.dtype + "'");
  }
  in.read(dst, static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes)
    throw Error("malformed FLD '" + path.string() + "': payload truncated");
  if (in.peek() != std::char_traits<char>::eof())
    throw Error("malformed FLD '" + path.string() + "': trailing bytes");
  return f;
}

std::vector<std::uint8_t> label_bytes(const Partition& p) {
  if (p.n() > 254) throw Error("label_bytes: too many phases for u8 labels");
  std::vector<std::uint8_t> out(p.spec().cells(), 0);
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = static_cast<std::uint8_t>(p.label(c) + 1);
  return out;
}

std::string trace_csv(const std::vector<IterationRecord>& trace) {
  std::string s = "iteration,beta,e_tilde,e_hat,changed_cells,adm_runs\n";
  for (const auto& r : trace) {
    s += std::to_string(r.k) + "," + fmt12(r.beta) + "," + fmt12(r.e_tilde) + "," + fmt12(r.e_hat) + "," +
         std::to_string(r.changed_cells) + "," + std::to_string(r.adm_runs) + "\n";
  }
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string metrics_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["method"] = m.method;
  j["grid"] = m.grid;
  j["seed"] = m.seed;
  j["iterations"] = m.iterations;
  j["stop_reason"] = m.stop_reason;
  j["final_e_tilde"] = m.final_e_tilde;
  j["final_e_hat"] = m.final_e_hat;
  j["iso_ratio"] = m.iso_ratio;
  j["volume_cells"] = m.volume_cells;
  j["wall_seconds"] = m.wall_seconds;
  return j.dump(2) + "\n";
}

void write_ppm(const fs::path& path, const Image& img) {
  if (img.rgb.size() != static_cast<std::size_t>(img.width) * img.height * 3) throw Error("write_ppm: bad buffer");
  std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  write_payload(path, header, img.rgb.data(), img.rgb.size());
}

Image read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string magic;
  Image img;
  int maxval = 0;
  in >> magic >> img.width >> img.height >> maxval;
  if (magic != "P6" || maxval != 255 || img.width <= 0 || img.height <= 0)
    throw Error("unsupported PPM '" + path.string() + "'");
  in.get();
  img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!in) throw Error("truncated PPM '" + path.string() + "'");
  return img;
}

std::array<std::uint8_t, 3> phase_color(int i) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 10> palette{{
      {228, 26, 28},
      {55, 126, 184},
      {77, 175, 74},
      {152, 78, 163},
      {255, 127, 0},
      {166, 86, 40},
      {247, 129, 191},
      {0, 170, 170},
      {200, 180, 0},
      {30, 30, 120},
  }};
  if (i < 0) return {255, 255, 255};
  return palette[static_cast<std::size_t>(i) % palette.size()];
}

namespace {

// Smoothed indicator of every phase present in `labels` (values 1..n).
std::vector<ScalarField> smoothed_phases(const GridSpec& spec, std::span<const std::uint8_t> labels, double tau) {
  int n = 0;
  for (auto l : labels) n = std::max<int>(n, l);
  std::vector<ScalarField> out;
  for (int i = 0; i < n; ++i) {
    ScalarField u(spec);
    for (std::size_t c = 0; c < labels.size(); ++c) u[c] = labels[c] == i + 1 ? 1.0 : 0.0;
    out.push_back(gaussian_convolve(u, tau));
  }
  return out;
}

// Image of the plane through `fixed` (axis `normal`) of a stack of smoothed
// phase fields; rows follow the slower remaining axis.
Image compose(const GridSpec& spec, const std::vector<ScalarField>& phases, int normal, int fixed) {
  const int n = spec.n_axis();
  int row_axis = 0, col_axis = 1;
  if (spec.dim() == 3) {
    row_axis = normal == 0 ? 1 : 0;
    col_axis = normal == 2 ? 1 : 2;
  }
  Image img{n, n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n * 3)};
  const auto bg = phase_color(-1);
  for (int r = 0; r < n; ++r) {
    for (int q = 0; q < n; ++q) {
      std::array<int, 3> ijk{0, 0, 0};
      if (spec.dim() == 3) ijk[normal] = fixed;
      ijk[row_axis] = r;
      ijk[col_axis] = q;
      const std::size_t cell = spec.ravel(ijk);
      double alpha_sum = 0.0;
      std::array<double, 3> rgb{0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < phases.size(); ++i) {
        const double a = std::clamp(phases[i][cell], 0.0, 1.0);
        const auto col = phase_color(static_cast<int>(i));
        for (int ch = 0; ch < 3; ++ch) rgb[ch] += a * col[ch];
        alpha_sum += a;
      }
      if (alpha_sum > 1.0) {
        for (auto& v : rgb) v /= alpha_sum;
        alpha_sum = 1.0;
      }
      auto* px = &img.rgb[(static_cast<std::size_t>(r) * n + q) * 3];
      for (int ch = 0; ch < 3; ++ch)
        px[ch] = static_cast<std::uint8_t>(std::lround(std::clamp(rgb[ch] + (1.0 - alpha_sum) * bg[ch], 0.0, 255.0)));
    }
  }
  return img;
}

}  // namespace

Image render_labels(const GridSpec& spec, std::span<const std::uint8_t> labels, double tau_render) {
  if (spec.dim() != 2) throw Error("render_labels: expected a 2D field");
  if (tau_render <= 0.0) tau_render = spec.dx();
  return compose(spec, smoothed_phases(spec, labels, tau_render), 2, 0);
}

std::vector<Image> render_field(const FieldFile& f, double tau_render) {
  if (tau_render <= 0.0) tau_render = f.spec.dx();
  std::vector<ScalarField> layers;
  if (f.dtype == "u8") {
    layers = smoothed_phases(f.spec, f.u8, tau_render);
  } else {
    // Scalar fields are shown as a single layer normalised to [0, 1].
    ScalarField s(f.spec, f.f64);
    const double lo = s.min(), hi = s.max();
    for (auto& v : s.values()) v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    layers.push_back(std::move(s));
  }
  if (f.spec.dim() == 2) return {compose(f.spec, layers, 2, 0)};
  const int mid = f.spec.n_axis() / 2;
  return {compose(f.spec, layers, 0, mid), compose(f.spec, layers, 1, mid), compose(f.spec, layers, 2, mid)};
}

}  // namespace fencelab::io
