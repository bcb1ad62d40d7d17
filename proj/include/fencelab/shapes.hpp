#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fencelab/fields.hpp"

namespace fencelab {

enum class ShapeKind { flower, disc, ball, square, rectangle, triangle, random_pentagon, cube };

/// Initial region description. Defaults give 2D areas close to the flower's
/// 0.4 pi^3 so energies are comparable across shapes.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::flower;
  double radius = 0.0;       // disc / ball; 0 selects the default
  double side = 0.0;         // square / cube side, triangle side
  double width = 0.0;        // rectangle
  double height = 0.0;       // rectangle
  int petals = 5;            // flower
  double petal_base = 0.4;   // flower: rho^2 < pi^2 (base + amp sin(petals theta))
  double petal_amp = 0.2;
  std::uint64_t seed = 0;    // random_pentagon
  std::vector<std::array<double, 2>> vertices;  // polygon shapes, filled on demand

  int dimension() const { return kind == ShapeKind::ball || kind == ShapeKind::cube ? 3 : 2; }
};

std::string to_string(ShapeKind k);
ShapeKind parse_shape_kind(const std::string& s);

/// Named shape with defaults filled in.
ShapeSpec make_shape(ShapeKind kind, std::uint64_t seed = 0);

/// Pentagon with vertex angles 2 pi j / 5 + U[-0.2, 0.2] and radii
/// U[0.4 pi, 0.8 pi], sorted by angle.
ShapeSpec random_pentagon(std::uint64_t seed);

/// Membership of a point according to the shape's analytic predicate.
bool contains(const ShapeSpec& shape, double x, double y, double z = 0.0);

/// Cell-centre sampling; throws if the result is empty, if the dimensions
/// disagree, or if the region reaches the two-cell ring at the domain edge.
IndicatorField rasterize(const ShapeSpec& shape, const GridSpec& grid);

/// Number of connected components of the region: face neighbours only
/// (4/6-connectivity), or with diagonal neighbours as well (8/26).
int connected_components(const IndicatorField& u, bool diagonal = false);

}  // namespace fencelab
