#include "fencelab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fencelab {

namespace {

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("setting '" + key + "': '" + s + "' is not a number");
  }
}

long long to_int(const std::string& key, const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error("setting '" + key + "': '" + s + "' is not an integer");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw Error("setting '" + key + "': '" + s + "' is not a boolean");
}

}  // namespace

double parse_length(const std::string& s, double dx) {
  if (s.size() > 2 && s.compare(s.size() - 2, 2, "dx") == 0) return to_double("length", s.substr(0, s.size() - 2)) * dx;
  return to_double("length", s);
}

RunConfig make_preset(const std::string& name) {
  RunConfig cfg;
  cfg.preset = name;
  auto& s = cfg.solver;
  s.lambda = 10.0;
  s.beta0 = 1.0;
  s.gamma = 0.5;
  s.beta_min = 0.05;
  s.M = 5;
  s.auction = AuctionParams{1000, 1e-7, 4.0, 0.1};
  if (name == "paper-2d") {
    cfg.dim = 2;
    cfg.n_axis = 256;
    s.r_tol = 1e-4;
    s.p = 5;
    cfg.shape = make_shape(ShapeKind::flower);
    s.c = {0.5, 0.5};
  } else if (name == "paper-3d") {
    cfg.dim = 3;
    cfg.n_axis = 128;
    s.r_tol = 5e-4;
    s.p = 3;
    cfg.shape = make_shape(ShapeKind::cube);
    s.c = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  } else {
    throw Error("unknown preset '" + name + "' (expected paper-2d or paper-3d)");
  }
  return cfg;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto& s = cfg.solver;
  if (key == "preset") {
    auto fresh = make_preset(value);
    fresh.out = cfg.out;
    cfg = std::move(fresh);
  } else if (key == "method") {
    s.method = parse_method(value);
  } else if (key == "grid") {
    // "256" keeps the dimension; "256x256" / "64x64x64" set it.
    auto parts = split(value, 'x');
    if (parts.empty()) throw Error("setting 'grid': empty value");
    const auto n = to_int(key, parts[0]);
    for (const auto& q : parts)
      if (to_int(key, q) != n) throw Error("setting 'grid': axes must have equal length");
    if (parts.size() > 1) cfg.dim = static_cast<int>(parts.size());
    cfg.n_axis = static_cast<int>(n);
  } else if (key == "dim") {
    cfg.dim = static_cast<int>(to_int(key, value));
  } else if (key == "shape") {
    const auto seed = cfg.shape.seed;
    cfg.shape = make_shape(parse_shape_kind(value), seed);
  } else if (key == "shape-seed") {
    cfg.shape.seed = static_cast<std::uint64_t>(to_int(key, value));
    if (cfg.shape.kind == ShapeKind::random_pentagon) cfg.shape = random_pentagon(cfg.shape.seed);
  } else if (key == "c") {
    s.c.clear();
    for (const auto& q : split(value, ',')) s.c.push_back(to_double(key, q));
  } else if (key == "tau") {
    parse_length(value, 1.0);
    cfg.tau = value;
  } else if (key == "tau-prime") {
    parse_length(value, 1.0);
    cfg.tau_prime = value;
  } else if (key == "lambda") {
    s.lambda = to_double(key, value);
  } else if (key == "beta0") {
    s.beta0 = to_double(key, value);
  } else if (key == "gamma") {
    s.gamma = to_double(key, value);
  } else if (key == "beta-min") {
    s.beta_min = to_double(key, value);
  } else if (key == "M") {
    s.M = static_cast<int>(to_int(key, value));
  } else if (key == "r-tol") {
    s.r_tol = to_double(key, value);
  } else if (key == "p") {
    s.p = static_cast<int>(to_int(key, value));
  } else if (key == "auction") {
    auto parts = split(value, ',');
    if (parts.size() != 4) throw Error("setting 'auction': expected m,eps_min,alpha,eps0");
    s.auction.m = static_cast<int>(to_int(key, parts[0]));
    s.auction.eps_min = to_double(key, parts[1]);
    s.auction.alpha = to_double(key, parts[2]);
    s.auction.eps0 = to_double(key, parts[3]);
  } else if (key == "seed") {
    s.seed = static_cast<std::uint64_t>(to_int(key, value));
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "snapshot-every") {
    cfg.snapshot_every = static_cast<int>(to_int(key, value));
  } else if (key == "render") {
    cfg.render = to_bool(key, value);
  } else if (key == "max-iterations") {
    s.max_iterations = static_cast<int>(to_int(key, value));
  } else if (key == "gamma-mono") {
    s.gamma_mono = to_double(key, value);
  } else if (key == "beta-floor") {
    s.beta_floor = to_double(key, value);
  } else if (key == "p-check") {
    s.p_check = static_cast<int>(to_int(key, value));
  } else {
    throw Error("unknown setting '" + key + "'");
  }
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config must be a flat JSON object");
  auto text = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_array()) {
      std::string s;
      for (const auto& e : v) {
        if (!s.empty()) s += ",";
        s += e.is_string() ? e.get<std::string>() : e.dump();
      }
      return s;
    }
    if (v.is_number_float()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      return buf;
    }
    return v.dump();
  };
  if (j.contains("preset")) apply_setting(cfg, "preset", text(j.at("preset")));
  // Shape before its seed so pentagons pick the seed up.
  if (j.contains("shape")) apply_setting(cfg, "shape", text(j.at("shape")));
  for (const auto& [key, value] : j.items()) {
    if (key == "preset" || key == "shape") continue;
    apply_setting(cfg, key, text(value));
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  try {
    apply_json(cfg, nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed config '" + path.string() + "': " + e.what());
  }
}

RunConfig load_config_file(const std::filesystem::path& path) {
  RunConfig cfg = make_preset("paper-2d");
  apply_config_file(cfg, path);
  return cfg;
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig s = solver;
  const double dx = grid().dx();
  s.tau = parse_length(tau, dx);
  s.tau_prime = parse_length(tau_prime, dx);
  return s;
}

void RunConfig::validate(bool need_out) const {
  const GridSpec g = grid();
  if (shape.dimension() != g.dim())
    throw Error("shape '" + to_string(shape.kind) + "' does not match a " + std::to_string(g.dim()) + "D grid");
  solver_config().validate();
  if (snapshot_every < 0) throw Error("snapshot-every must be >= 0");
  if (need_out) {
    if (out.empty()) throw Error("no output directory given (--out)");
    if (!std::filesystem::is_directory(out)) throw Error("output directory '" + out.string() + "' does not exist");
  }
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["preset"] = preset;
  j["method"] = to_string(solver.method);
  j["grid"] = std::to_string(n_axis) + (dim == 3 ? "x" + std::to_string(n_axis) + "x" + std::to_string(n_axis)
                                                 : "x" + std::to_string(n_axis));
  j["shape"] = to_string(shape.kind);
  j["shape-seed"] = shape.seed;
  j["c"] = solver.c;
  j["tau"] = tau;
  j["tau-prime"] = tau_prime;
  j["lambda"] = solver.lambda;
  j["beta0"] = solver.beta0;
  j["gamma"] = solver.gamma;
  j["beta-min"] = solver.beta_min;
  j["M"] = solver.M;
  j["r-tol"] = solver.r_tol;
  j["p"] = solver.p;
  j["auction"] = nlohmann::ordered_json::array(
      {solver.auction.m, solver.auction.eps_min, solver.auction.alpha, solver.auction.eps0});
  j["seed"] = solver.seed;
  j["out"] = out.string();
  j["snapshot-every"] = snapshot_every;
  j["render"] = render;
  j["max-iterations"] = solver.max_iterations;
  j["gamma-mono"] = solver.gamma_mono;
  j["beta-floor"] = solver.beta_floor;
  j["p-check"] = solver.p_check;
  return j;
}

}  // namespace fencelab
