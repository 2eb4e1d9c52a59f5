#include "dstft/lattice.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "dstft/error.hpp"

namespace dstft {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::lattice_mismatch: return "LatticeMismatch";
    case Errc::pairing_degenerate: return "PairingDegenerate";
    case Errc::dependent_directions: return "DependentDirections";
    case Errc::singular_b: return "SingularB";
    case Errc::eta_too_large: return "EtaTooLarge";
    case Errc::empty_cone: return "EmptyCone";
    case Errc::unknown_kind: return "UnknownKind";
    case Errc::parse: return "ParseError";
    case Errc::io: return "IoError";
  }
  return "Unknown";
}

Lattice Lattice::make(std::vector<double> origin, std::vector<double> step,
                      std::vector<std::size_t> count) {
  if (origin.empty()) throw Error(Errc::invalid_argument, "lattice needs at least one axis");
  if (step.size() != origin.size() || count.size() != origin.size()) {
    throw Error(Errc::invalid_argument, "origin, step and count must have equal length");
  }
  for (std::size_t a = 0; a < origin.size(); ++a) {
    if (!std::isfinite(origin[a])) throw Error(Errc::invalid_argument, "non-finite origin");
    if (!(step[a] > 0.0) || !std::isfinite(step[a])) {
      throw Error(Errc::invalid_argument, "step must be positive on axis " + std::to_string(a));
    }
    if (count[a] < 1) {
      throw Error(Errc::invalid_argument, "count must be >= 1 on axis " + std::to_string(a));
    }
  }
  Lattice lat;
  lat.origin_ = std::move(origin);
  lat.step_ = std::move(step);
  lat.count_ = std::move(count);
  return lat;
}

std::size_t Lattice::size() const noexcept {
  return std::accumulate(count_.begin(), count_.end(), std::size_t{1}, std::multiplies<>());
}

double Lattice::cell_volume() const noexcept {
  return std::accumulate(step_.begin(), step_.end(), 1.0, std::multiplies<>());
}

std::vector<double> Lattice::point(std::span<const std::size_t> index) const {
  std::vector<double> p(dim());
  for (std::size_t a = 0; a < dim(); ++a) p[a] = coordinate(a, index[a]);
  return p;
}

std::vector<double> Lattice::point_at(std::size_t flat) const {
  std::vector<double> p(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    p[a] = coordinate(a, flat % count_[a]);
    flat /= count_[a];
  }
  return p;
}

MultiIndex Lattice::multi_index(std::size_t flat) const {
  MultiIndex idx(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    idx[a] = flat % count_[a];
    flat /= count_[a];
  }
  return idx;
}

std::size_t Lattice::flat_index(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dim(); ++a) flat = flat * count_[a] + index[a];
  return flat;
}

std::optional<MultiIndex> Lattice::index_of(std::span<const double> p) const {
  if (p.size() != dim()) return std::nullopt;
  MultiIndex idx(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    const double j = std::round((p[a] - origin_[a]) / step_[a]);
    if (j < 0.0 || j >= static_cast<double>(count_[a])) return std::nullopt;
    idx[a] = static_cast<std::size_t>(j);
    if (coordinate(a, idx[a]) != p[a]) return std::nullopt;
  }
  return idx;
}

FrequencyLattice Lattice::dual() const { return FrequencyLattice(step_, count_); }

FrequencyLattice::FrequencyLattice(std::vector<double> signal_step, std::vector<std::size_t> count)
    : signal_step_(std::move(signal_step)), count_(std::move(count)) {
  if (signal_step_.size() != count_.size() || count_.empty()) {
    throw Error(Errc::invalid_argument, "frequency lattice axes mismatch");
  }
  for (std::size_t a = 0; a < count_.size(); ++a) {
    if (!(signal_step_[a] > 0.0) || count_[a] < 2) {
      throw Error(Errc::invalid_argument, "invalid frequency lattice axis " + std::to_string(a));
    }
  }
}

std::size_t FrequencyLattice::size() const noexcept {
  return std::accumulate(count_.begin(), count_.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<double> FrequencyLattice::steps() const {
  std::vector<double> s(dim());
  for (std::size_t a = 0; a < dim(); ++a) s[a] = step(a);
  return s;
}

double FrequencyLattice::cell_volume() const noexcept {
  double v = 1.0;
  for (std::size_t a = 0; a < dim(); ++a) v *= step(a);
  return v;
}

std::vector<double> FrequencyLattice::frequency_at(std::size_t flat) const {
  std::vector<double> xi(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    xi[a] = frequency(a, flat % count_[a]);
    flat /= count_[a];
  }
  return xi;
}

MultiIndex FrequencyLattice::multi_index(std::size_t flat) const {
  MultiIndex idx(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    idx[a] = flat % count_[a];
    flat /= count_[a];
  }
  return idx;
}

std::size_t FrequencyLattice::flat_index(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dim(); ++a) flat = flat * count_[a] + index[a];
  return flat;
}

std::optional<std::size_t> FrequencyLattice::centered_index(std::size_t axis,
                                                            long long m) const noexcept {
  const long long i = m + static_cast<long long>(count_[axis] / 2);
  if (i < 0 || i >= static_cast<long long>(count_[axis])) return std::nullopt;
  return static_cast<std::size_t>(i);
}

bool FrequencyLattice::is_dual_of(const Lattice& lattice) const noexcept {
  return lattice.step() == signal_step_ && lattice.count() == count_;
}

SampledField::SampledField(Lattice lat, std::vector<Complex> vals, std::string lbl)
    : lattice(std::move(lat)), values(std::move(vals)), label(std::move(lbl)) {
  if (values.size() != lattice.size()) {
    throw Error(Errc::dimension_mismatch, "field has " + std::to_string(values.size()) +
                                              " values for a lattice of " +
                                              std::to_string(lattice.size()) + " points");
  }
}

SampledField::SampledField(Lattice lat, std::string lbl)
    : lattice(std::move(lat)), values(lattice.size()), label(std::move(lbl)) {}

double SampledField::norm_l2_squared() const {
  double acc = 0.0;
  for (const auto& v : values) acc += std::norm(v);
  return acc * lattice.cell_volume();
}

double SampledField::norm_l2() const { return std::sqrt(norm_l2_squared()); }

Complex riemann_integral(const SampledField& field) {
  Complex acc{};
  for (const auto& v : field.values) acc += v;
  return acc * field.lattice.cell_volume();
}

Complex inner_product(const SampledField& a, const SampledField& b) {
  if (!(a.lattice == b.lattice)) throw Error(Errc::lattice_mismatch, "inner product of fields on different lattices");
  Complex acc{};
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * std::conj(b.values[i]);
  return acc * a.lattice.cell_volume();
}

double relative_l2_error(const SampledField& a, const SampledField& reference) {
  if (!(a.lattice == reference.lattice)) throw Error(Errc::lattice_mismatch, "relative error of fields on different lattices");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - reference.values[i]);
    den += std::norm(reference.values[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

}  // namespace dstft
