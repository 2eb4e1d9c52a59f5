#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dstft {

using Complex = std::complex<double>;
using MultiIndex = std::vector<std::size_t>;

class FrequencyLattice;

/// Uniform n-dimensional sampling lattice: point(j) = origin + j * step.
///
/// Flat indices are row-major with the last axis fastest.
class Lattice {
 public:
  Lattice() = default;

  /// Throws Errc::invalid_argument on non-positive steps, zero counts,
  /// non-finite entries or mismatched vector lengths.
  static Lattice make(std::vector<double> origin, std::vector<double> step,
                      std::vector<std::size_t> count);

  std::size_t dim() const noexcept { return origin_.size(); }
  const std::vector<double>& origin() const noexcept { return origin_; }
  const std::vector<double>& step() const noexcept { return step_; }
  const std::vector<std::size_t>& count() const noexcept { return count_; }

  std::size_t size() const noexcept;
  double cell_volume() const noexcept;

  double coordinate(std::size_t axis, std::size_t j) const noexcept {
    return origin_[axis] + static_cast<double>(j) * step_[axis];
  }
  std::vector<double> point(std::span<const std::size_t> index) const;
  std::vector<double> point_at(std::size_t flat) const;

  MultiIndex multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::size_t> index) const;

  /// Index whose point equals `p` exactly, if any.
  std::optional<MultiIndex> index_of(std::span<const double> p) const;

  /// Closed interval [origin, origin + (count-1) step] on an axis.
  double lower(std::size_t axis) const noexcept { return origin_[axis]; }
  double upper(std::size_t axis) const noexcept { return coordinate(axis, count_[axis] - 1); }

  FrequencyLattice dual() const;

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  std::vector<double> origin_;
  std::vector<double> step_;
  std::vector<std::size_t> count_;
};

/// Frequency grid dual to a signal lattice, reported in centered order.
///
/// Centered index i on an axis of N bins maps to bin m = i - floor(N/2),
/// i.e. m runs over [-floor(N/2), ceil(N/2)), and frequency m * step where
/// step = 1 / (N * signal_step). The step is derived from the stored
/// signal step so the duality holds by construction.
class FrequencyLattice {
 public:
  FrequencyLattice() = default;
  FrequencyLattice(std::vector<double> signal_step, std::vector<std::size_t> count);

  std::size_t dim() const noexcept { return count_.size(); }
  const std::vector<std::size_t>& count() const noexcept { return count_; }
  const std::vector<double>& signal_step() const noexcept { return signal_step_; }
  std::size_t size() const noexcept;

  double step(std::size_t axis) const noexcept {
    return 1.0 / (static_cast<double>(count_[axis]) * signal_step_[axis]);
  }
  std::vector<double> steps() const;
  double cell_volume() const noexcept;
  double nyquist(std::size_t axis) const noexcept { return 0.5 / signal_step_[axis]; }

  long long bin(std::size_t axis, std::size_t centered) const noexcept {
    return static_cast<long long>(centered) - static_cast<long long>(count_[axis] / 2);
  }
  double frequency(std::size_t axis, std::size_t centered) const noexcept {
    return static_cast<double>(bin(axis, centered)) * step(axis);
  }
  std::vector<double> frequency_at(std::size_t flat) const;

  MultiIndex multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::size_t> index) const;

  /// Centered index of bin m on an axis, if representable.
  std::optional<std::size_t> centered_index(std::size_t axis, long long m) const noexcept;

  bool is_dual_of(const Lattice& lattice) const noexcept;

  friend bool operator==(const FrequencyLattice&, const FrequencyLattice&) = default;

 private:
  std::vector<double> signal_step_;
  std::vector<std::size_t> count_;
};

/// Complex samples of a function on a lattice (real inputs are promoted).
struct SampledField {
  Lattice lattice;
  std::vector<Complex> values;
  std::string label;

  SampledField() = default;
  SampledField(Lattice lat, std::vector<Complex> vals, std::string lbl = {});
  /// Zero field on `lat`.
  explicit SampledField(Lattice lat, std::string lbl = {});

  /// Samples fn(point) at every lattice point.
  template <class Fn>
  static SampledField from_function(const Lattice& lat, Fn&& fn, std::string lbl = {}) {
    SampledField field(lat, std::move(lbl));
    for (std::size_t i = 0; i < field.values.size(); ++i) field.values[i] = fn(lat.point_at(i));
    return field;
  }

  /// Delta^n * sum |values|^2.
  double norm_l2_squared() const;
  double norm_l2() const;
};

/// Left-endpoint Riemann sum Delta^n * sum(values); the quadrature used throughout.
Complex riemann_integral(const SampledField& field);

/// Delta^n * sum a * conj(b). Throws Errc::lattice_mismatch unless lattices agree.
Complex inner_product(const SampledField& a, const SampledField& b);

/// Relative L2 distance ||a - b|| / ||b||; a and b must share a lattice.
double relative_l2_error(const SampledField& a, const SampledField& reference);

}  // namespace dstft
