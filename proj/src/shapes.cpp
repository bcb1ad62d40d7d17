#include "fencelab/shapes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fencelab/auction.hpp"

namespace fencelab {

namespace {

constexpr double pi = std::numbers::pi;
// Area of the five-petal flower, the reference volume for 2D defaults.
const double kReferenceArea = 0.4 * pi * pi * pi;

bool in_polygon(const std::vector<std::array<double, 2>>& v, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const auto& a = v[i];
    const auto& b = v[j];
    if ((a[1] > y) != (b[1] > y)) {
      const double xc = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
      if (x < xc) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

std::string to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::flower: return "flower";
    case ShapeKind::disc: return "disc";
    case ShapeKind::ball: return "ball";
    case ShapeKind::square: return "square";
    case ShapeKind::rectangle: return "rectangle";
    case ShapeKind::triangle: return "triangle";
    case ShapeKind::random_pentagon: return "pentagon";
    case ShapeKind::cube: return "cube";
  }
  return "?";
}

ShapeKind parse_shape_kind(const std::string& s) {
  for (auto k : {ShapeKind::flower, ShapeKind::disc, ShapeKind::ball, ShapeKind::square, ShapeKind::rectangle,
                 ShapeKind::triangle, ShapeKind::random_pentagon, ShapeKind::cube})
    if (to_string(k) == s) return k;
  if (s == "random_pentagon") return ShapeKind::random_pentagon;
  throw Error("unknown shape '" + s + "'");
}

ShapeSpec random_pentagon(std::uint64_t seed) {
  ShapeSpec s;
  s.kind = ShapeKind::random_pentagon;
  s.seed = seed;
  SplitMix64 rng(seed ^ 0x5EED5EED5EED5EEDULL);
  const double mean_radius = 0.8 * pi;
  std::vector<std::pair<double, double>> polar;
  for (int j = 0; j < 5; ++j) {
    const double theta = 2.0 * pi * j / 5.0 + (rng.uniform() * 0.4 - 0.2);
    const double r = mean_radius * (0.5 + 0.5 * rng.uniform());
    polar.emplace_back(theta, r);
  }
  std::sort(polar.begin(), polar.end());
  for (auto [theta, r] : polar) s.vertices.push_back({r * std::cos(theta), r * std::sin(theta)});
  return s;
}

ShapeSpec make_shape(ShapeKind kind, std::uint64_t seed) {
  if (kind == ShapeKind::random_pentagon) return random_pentagon(seed);
  ShapeSpec s;
  s.kind = kind;
  switch (kind) {
    case ShapeKind::disc: s.radius = std::sqrt(kReferenceArea / pi); break;
    case ShapeKind::ball: s.radius = 1.8; break;
    case ShapeKind::square: s.side = std::sqrt(kReferenceArea); break;
    case ShapeKind::rectangle:
      s.height = std::sqrt(kReferenceArea / 2.0);
      s.width = 2.0 * s.height;
      break;
    case ShapeKind::triangle: s.side = std::sqrt(4.0 * kReferenceArea / std::sqrt(3.0)); break;
    case ShapeKind::cube: s.side = 3.0; break;
    default: break;
  }
  return s;
}

bool contains(const ShapeSpec& s, double x, double y, double z) {
  switch (s.kind) {
    case ShapeKind::flower: {
      const double rho2 = x * x + y * y;
      const double theta = std::atan2(y, x);
      return rho2 < pi * pi * (s.petal_base + s.petal_amp * std::sin(s.petals * theta));
    }
    case ShapeKind::disc: return x * x + y * y < s.radius * s.radius;
    case ShapeKind::ball: return x * x + y * y + z * z < s.radius * s.radius;
    case ShapeKind::square: return std::abs(x) < s.side / 2 && std::abs(y) < s.side / 2;
    case ShapeKind::rectangle: return std::abs(x) < s.width / 2 && std::abs(y) < s.height / 2;
    case ShapeKind::cube: return std::abs(x) < s.side / 2 && std::abs(y) < s.side / 2 && std::abs(z) < s.side / 2;
    case ShapeKind::triangle: {
      // Equilateral, apex up, centred on its bounding box.
      const double h = s.side * std::sqrt(3.0) / 2.0;
      const double yy = y + h / 2;  // base at yy = 0
      if (yy <= 0.0 || yy >= h) return false;
      return std::abs(x) < (s.side / 2) * (1.0 - yy / h);
    }
    case ShapeKind::random_pentagon: return in_polygon(s.vertices, x, y);
  }
  return false;
}

IndicatorField rasterize(const ShapeSpec& shape, const GridSpec& grid) {
  if (shape.dimension() != grid.dim())
    throw Error("shape '" + to_string(shape.kind) + "' is " + std::to_string(shape.dimension()) + "D but the grid is " +
                std::to_string(grid.dim()) + "D");
  ShapeSpec s = shape;
  if (s.kind == ShapeKind::random_pentagon && s.vertices.empty()) s = random_pentagon(s.seed);
  const int n = grid.n_axis();
  std::vector<std::uint8_t> v(grid.cells(), 0);
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    auto ijk = grid.unravel(idx);
    const double x = grid.coord(ijk[0]);
    const double y = grid.coord(ijk[1]);
    const double z = grid.dim() == 3 ? grid.coord(ijk[2]) : 0.0;
    if (!contains(s, x, y, z)) continue;
    for (int a = 0; a < grid.dim(); ++a)
      if (ijk[a] < 2 || ijk[a] >= n - 2) throw Error("shape '" + to_string(s.kind) + "' touches the domain edge");
    v[idx] = 1;
  }
  IndicatorField f(grid, std::move(v));
  if (f.count() == 0) throw Error("shape '" + to_string(s.kind) + "' rasterizes to an empty region");
  return f;
}

int connected_components(const IndicatorField& u, bool diagonal) {
  const auto& spec = u.spec();
  const int d = spec.dim();
  // Neighbour offsets: axis steps only, or the full 3^d - 1 stencil.
  std::vector<std::array<int, 3>> offsets;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = (d == 3 ? -1 : 0); k <= (d == 3 ? 1 : 0); ++k) {
        const int nonzero = (i != 0) + (j != 0) + (k != 0);
        if (nonzero == 0 || (!diagonal && nonzero > 1)) continue;
        offsets.push_back({i, j, k});
      }
  std::vector<int> comp(u.size(), -1);
  std::vector<std::size_t> stack;
  int count = 0;
  for (std::size_t start = 0; start < u.size(); ++start) {
    if (!u[start] || comp[start] >= 0) continue;
    comp[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      for (const auto& off : offsets) {
        std::size_t nb = c;
        for (int a = 0; a < d; ++a)
          if (off[a] != 0) nb = spec.neighbour(nb, a, off[a]);
        if (u[nb] && comp[nb] < 0) {
          comp[nb] = count;
          stack.push_back(nb);
        }
      }
    }
    ++count;
  }
  return count;
}

}  // namespace fencelab
