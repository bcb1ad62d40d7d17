#include "fencelab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fencelab {

GridSpec::GridSpec(int dim, int n_axis) : dim_(dim), n_(n_axis) {
  if (dim != 2 && dim != 3) throw Error("grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (n_axis < 8 || n_axis % 2 != 0)
    throw Error("cells per axis must be even and >= 8, got " + std::to_string(n_axis));
  cells_ = 1;
  for (int a = 0; a < dim; ++a) cells_ *= static_cast<std::size_t>(n_axis);
}

double GridSpec::cell_volume() const { return std::pow(dx(), dim_); }

std::array<int, 3> GridSpec::unravel(std::size_t idx) const {
  std::array<int, 3> ijk{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    ijk[a] = static_cast<int>(idx % n_);
    idx /= n_;
  }
  return ijk;
}

std::size_t GridSpec::ravel(const std::array<int, 3>& ijk) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) idx = idx * n_ + static_cast<std::size_t>(ijk[a]);
  return idx;
}

std::size_t GridSpec::neighbour(std::size_t idx, int axis, int step) const {
  auto ijk = unravel(idx);
  ijk[axis] = ((ijk[axis] + step) % n_ + n_) % n_;
  return ravel(ijk);
}

std::string GridSpec::describe() const {
  std::string s = std::to_string(n_);
  for (int a = 1; a < dim_; ++a) s += "x" + std::to_string(n_);
  return s;
}

void require_same_spec(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw Error(std::string(what) + ": grid mismatch (" + a.describe() + " vs " + b.describe() + ")");
}

// ---------------------------------------------------------------------------

IndicatorField::IndicatorField(const GridSpec& spec) : spec_(spec), values_(spec.cells(), 0) {}

IndicatorField::IndicatorField(const GridSpec& spec, std::vector<std::uint8_t> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.cells()) throw Error("indicator field size does not match grid");
  for (auto& v : values_) {
    if (v > 1) throw Error("indicator field values must be 0 or 1");
    count_ += v;
  }
}

IndicatorField IndicatorField::full(const GridSpec& spec) {
  return IndicatorField(spec, std::vector<std::uint8_t>(spec.cells(), 1));
}

IndicatorField IndicatorField::from_cells(const GridSpec& spec, std::span<const std::size_t> cells) {
  std::vector<std::uint8_t> v(spec.cells(), 0);
  for (auto c : cells) {
    if (c >= v.size()) throw Error("cell index out of range");
    v[c] = 1;
  }
  return IndicatorField(spec, std::move(v));
}

std::vector<std::size_t> IndicatorField::active_cells() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i]) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.cells()) throw Error("scalar field size does not match grid");
}

ScalarField ScalarField::from_indicator(const IndicatorField& f) {
  ScalarField s(f.spec());
  auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) s.values_[i] = v[i];
  return s;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

// ---------------------------------------------------------------------------

Partition::Partition(const IndicatorField& support, int n_phases, std::vector<std::int16_t> labels)
    : support_(support), n_(n_phases), labels_(std::move(labels)), counts_(n_phases, 0) {
  if (n_phases < 1 || n_phases > 255) throw Error("phase count must be in [1, 255]");
  if (labels_.size() != support_.size()) throw Error("partition labels do not match grid");
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    const int l = labels_[c];
    if (support_[c]) {
      if (l < 0 || l >= n_) throw Error("support cell " + std::to_string(c) + " has no valid phase");
      ++counts_[l];
    } else if (l != -1) {
      throw Error("phase label outside the support at cell " + std::to_string(c));
    }
  }
}

Partition Partition::from_phases(const IndicatorField& support, std::span<const IndicatorField> phases) {
  std::vector<std::int16_t> labels(support.size(), -1);
  for (std::size_t i = 0; i < phases.size(); ++i) {
    require_same_spec(support.spec(), phases[i].spec(), "partition");
    auto v = phases[i].values();
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (!v[c]) continue;
      if (labels[c] != -1) throw Error("phases overlap at cell " + std::to_string(c));
      labels[c] = static_cast<std::int16_t>(i);
    }
  }
  return Partition(support, static_cast<int>(phases.size()), std::move(labels));
}

IndicatorField Partition::phase(int i) const {
  std::vector<std::uint8_t> v(labels_.size(), 0);
  for (std::size_t c = 0; c < labels_.size(); ++c) v[c] = labels_[c] == i;
  return IndicatorField(spec(), std::move(v));
}

std::vector<IndicatorField> Partition::phases() const {
  std::vector<IndicatorField> out;
  out.reserve(n_);
  for (int i = 0; i < n_; ++i) out.push_back(phase(i));
  return out;
}

void Partition::require_counts(std::span<const std::size_t> targets) const {
  if (targets.size() != counts_.size()) throw Error("partition has wrong number of phases");
  for (std::size_t i = 0; i < targets.size(); ++i)
    if (counts_[i] != targets[i])
      throw Error("phase " + std::to_string(i) + " holds " + std::to_string(counts_[i]) + " cells, expected " +
                  std::to_string(targets[i]));
}

// ---------------------------------------------------------------------------

double volume(const IndicatorField& f) { return static_cast<double>(f.count()) * f.spec().cell_volume(); }

namespace {
template <class Op>
IndicatorField combine(const IndicatorField& a, const IndicatorField& b, const char* what, Op op) {
  require_same_spec(a.spec(), b.spec(), what);
  auto va = a.values();
  auto vb = b.values();
  std::vector<std::uint8_t> out(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) out[i] = op(va[i], vb[i]);
  return IndicatorField(a.spec(), std::move(out));
}
}  // namespace

IndicatorField set_difference(const IndicatorField& a, const IndicatorField& b) {
  return combine(a, b, "set_difference", [](std::uint8_t x, std::uint8_t y) -> std::uint8_t { return x & !y; });
}
IndicatorField set_union(const IndicatorField& a, const IndicatorField& b) {
  return combine(a, b, "set_union", [](std::uint8_t x, std::uint8_t y) -> std::uint8_t { return x | y; });
}
IndicatorField set_intersection(const IndicatorField& a, const IndicatorField& b) {
  return combine(a, b, "set_intersection", [](std::uint8_t x, std::uint8_t y) -> std::uint8_t { return x & y; });
}

IndicatorField complement(const IndicatorField& a) {
  auto va = a.values();
  std::vector<std::uint8_t> out(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) out[i] = !va[i];
  return IndicatorField(a.spec(), std::move(out));
}

bool equal(const IndicatorField& a, const IndicatorField& b) {
  require_same_spec(a.spec(), b.spec(), "equal");
  return a.count() == b.count() && std::ranges::equal(a.values(), b.values());
}

std::size_t hamming_distance(const IndicatorField& a, const IndicatorField& b) {
  require_same_spec(a.spec(), b.spec(), "hamming_distance");
  auto va = a.values();
  auto vb = b.values();
  std::size_t d = 0;
  for (std::size_t i = 0; i < va.size(); ++i) d += va[i] != vb[i];
  return d;
}

}  // namespace fencelab
