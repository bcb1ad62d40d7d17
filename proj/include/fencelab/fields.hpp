#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fencelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform periodic grid on [-pi, pi]^d.
///
/// Cell i along an axis sits at x_i = -pi + i * dx. Linear indices are
/// row-major with x the slowest axis and the last axis (y in 2D, z in 3D)
/// the fastest. Every deterministic tie-break in the library refers to this
/// order.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int dim, int n_axis);

  int dim() const { return dim_; }
  int n_axis() const { return n_; }
  double dx() const { return 2.0 * std::numbers::pi / n_; }
  double cell_volume() const;
  std::size_t cells() const { return cells_; }

  double coord(int i) const { return -std::numbers::pi + i * dx(); }

  /// Per-axis indices of a linear cell index (unused trailing axes are 0).
  std::array<int, 3> unravel(std::size_t idx) const;
  std::size_t ravel(const std::array<int, 3>& ijk) const;

  /// Periodic neighbour of `idx` shifted by `step` along `axis`.
  std::size_t neighbour(std::size_t idx, int axis, int step) const;

  bool operator==(const GridSpec& o) const = default;
  std::string describe() const;

 private:
  int dim_ = 0;
  int n_ = 0;
  std::size_t cells_ = 0;
};

void require_same_spec(const GridSpec& a, const GridSpec& b, const char* what);

/// Binary field with an exact integer count of active cells.
class IndicatorField {
 public:
  IndicatorField() = default;
  explicit IndicatorField(const GridSpec& spec);  // all zero
  IndicatorField(const GridSpec& spec, std::vector<std::uint8_t> values);

  static IndicatorField full(const GridSpec& spec);
  static IndicatorField from_cells(const GridSpec& spec, std::span<const std::size_t> cells);

  const GridSpec& spec() const { return spec_; }
  std::size_t count() const { return count_; }
  std::size_t size() const { return values_.size(); }
  bool operator[](std::size_t i) const { return values_[i] != 0; }
  std::span<const std::uint8_t> values() const { return values_; }

  /// Active cell indices in canonical order.
  std::vector<std::size_t> active_cells() const;

  bool operator==(const IndicatorField& o) const {
    return spec_ == o.spec_ && values_ == o.values_;
  }

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> values_;
  std::size_t count_ = 0;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& spec, double fill = 0.0)
      : spec_(spec), values_(spec.cells(), fill) {}
  ScalarField(const GridSpec& spec, std::vector<double> values);

  static ScalarField from_indicator(const IndicatorField& f);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double min() const;
  double max() const;
  double sum() const;
  double mean() const { return sum() / static_cast<double>(values_.size()); }

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Ordered set of n disjoint phases covering a support region.
///
/// Stored as a label per cell: -1 outside the support, otherwise the phase
/// index. Disjointness and coverage hold by construction.
class Partition {
 public:
  Partition() = default;
  Partition(const IndicatorField& support, int n_phases, std::vector<std::int16_t> labels);
  /// Validates disjointness and that the union equals `support`.
  static Partition from_phases(const IndicatorField& support, std::span<const IndicatorField> phases);

  const GridSpec& spec() const { return support_.spec(); }
  int n() const { return n_; }
  const IndicatorField& support() const { return support_; }
  std::span<const std::int16_t> labels() const { return labels_; }
  std::int16_t label(std::size_t cell) const { return labels_[cell]; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  IndicatorField phase(int i) const;
  std::vector<IndicatorField> phases() const;

  /// Throws unless every phase count equals its target.
  void require_counts(std::span<const std::size_t> targets) const;

  bool operator==(const Partition& o) const {
    return n_ == o.n_ && support_ == o.support_ && labels_ == o.labels_;
  }

 private:
  IndicatorField support_;
  int n_ = 0;
  std::vector<std::int16_t> labels_;
  std::vector<std::size_t> counts_;
};

double volume(const IndicatorField& f);
IndicatorField set_difference(const IndicatorField& a, const IndicatorField& b);
IndicatorField set_union(const IndicatorField& a, const IndicatorField& b);
IndicatorField set_intersection(const IndicatorField& a, const IndicatorField& b);
IndicatorField complement(const IndicatorField& a);
bool equal(const IndicatorField& a, const IndicatorField& b);
std::size_t hamming_distance(const IndicatorField& a, const IndicatorField& b);

}  // namespace fencelab
