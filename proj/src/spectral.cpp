#include "fencelab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace fencelab {

namespace {

// The FFTW planner is not thread-safe; plan execution on private buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t half_spectrum_size(const GridSpec& spec) {
  std::size_t s = static_cast<std::size_t>(spec.n_axis() / 2 + 1);
  for (int a = 1; a < spec.dim(); ++a) s *= static_cast<std::size_t>(spec.n_axis());
  return s;
}

class Workspace {
 public:
  explicit Workspace(const GridSpec& spec) : spec_(spec) {
    const std::size_t n = spec.cells();
    const std::size_t nh = half_spectrum_size(spec);
    real_ = fftw_alloc_real(n);
    spec_buf_ = fftw_alloc_complex(nh);
    const int dims[3] = {spec.n_axis(), spec.n_axis(), spec.n_axis()};
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c(spec.dim(), dims, real_, spec_buf_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r(spec.dim(), dims, spec_buf_, real_, FFTW_ESTIMATE);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  ~Workspace() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_buf_);
  }

  const std::vector<double>& multiplier(double tau) {
    auto it = multipliers_.find(tau);
    if (it == multipliers_.end()) {
      if (multipliers_.size() > 16) multipliers_.clear();
      it = multipliers_.emplace(tau, HeatMultiplier::make(spec_, tau).values).first;
    }
    return it->second;
  }

  void convolve(std::span<const double> in, std::span<double> out, double tau, bool clamp = true) {
    const std::size_t n = spec_.cells();
    const std::size_t nh = half_spectrum_size(spec_);
    double lo = in[0];
    double hi = in[0];
    for (std::size_t i = 0; i < n; ++i) {
      real_[i] = in[i];
      lo = std::min(lo, in[i]);
      hi = std::max(hi, in[i]);
    }
    const auto& mult = multiplier(tau);
    fftw_execute(forward_);
    for (std::size_t k = 0; k < nh; ++k) {
      spec_buf_[k][0] *= mult[k];
      spec_buf_[k][1] *= mult[k];
    }
    fftw_execute(backward_);
    const double scale = 1.0 / static_cast<double>(n);
    if (clamp) {
      for (std::size_t i = 0; i < n; ++i) out[i] = std::clamp(real_[i] * scale, lo, hi);
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = real_[i] * scale;
    }
  }

 private:
  GridSpec spec_;
  double* real_ = nullptr;
  fftw_complex* spec_buf_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::map<double, std::vector<double>> multipliers_;
};

Workspace& workspace_for(const GridSpec& spec) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Workspace>> cache;
  auto key = std::make_pair(spec.dim(), spec.n_axis());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Workspace>(spec)).first;
  return *it->second;
}

}  // namespace

HeatMultiplier HeatMultiplier::make(const GridSpec& spec, double tau) {
  if (!(tau > 0.0)) throw Error("heat multiplier needs tau > 0");
  HeatMultiplier m{spec, tau, {}};
  const int n = spec.n_axis();
  const int nh = n / 2 + 1;
  m.values.resize(half_spectrum_size(spec));
  std::size_t k = 0;
  if (spec.dim() == 2) {
    for (int i = 0; i < n; ++i) {
      const double fx = frequency(i, n);
      for (int j = 0; j < nh; ++j) m.values[k++] = std::exp(-tau * (fx * fx + double(j) * j));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double fx = frequency(i, n);
      for (int j = 0; j < n; ++j) {
        const double fy = frequency(j, n);
        for (int l = 0; l < nh; ++l) m.values[k++] = std::exp(-tau * (fx * fx + fy * fy + double(l) * l));
      }
    }
  }
  return m;
}

double HeatMultiplier::at(int fx, int fy, int fz) const {
  const double r2 = double(fx) * fx + double(fy) * fy + double(fz) * fz;
  return std::exp(-tau * r2);
}

void gaussian_convolve(const GridSpec& spec, std::span<const double> in, std::span<double> out, double tau) {
  if (!(tau > 0.0)) throw Error("gaussian_convolve needs tau > 0");
  if (in.size() != spec.cells() || out.size() != spec.cells()) throw Error("gaussian_convolve: size mismatch");
  workspace_for(spec).convolve(in, out, tau);
}

ScalarField gaussian_convolve(const ScalarField& u, double tau) {
  ScalarField out(u.spec());
  gaussian_convolve(u.spec(), u.values(), out.values(), tau);
  return out;
}

ScalarField gaussian_convolve(const IndicatorField& u, double tau) {
  return gaussian_convolve(ScalarField::from_indicator(u), tau);
}

namespace detail {
ScalarField gaussian_convolve_unclamped(const ScalarField& u, double tau) {
  if (!(tau > 0.0)) throw Error("gaussian_convolve needs tau > 0");
  ScalarField out(u.spec());
  workspace_for(u.spec()).convolve(u.values(), out.values(), tau, false);
  return out;
}
}  // namespace detail

double semigroup_property_check(const ScalarField& u, double tau) {
  auto half = gaussian_convolve(gaussian_convolve(u, tau / 2), tau / 2);
  auto full = gaussian_convolve(u, tau);
  double defect = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) defect = std::max(defect, std::abs(half[i] - full[i]));
  return defect;
}

}  // namespace fencelab
