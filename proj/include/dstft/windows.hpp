#pragma once

#include <complex>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dstft/lattice.hpp"

namespace dstft {

class DirectionFrame;

/// One-dimensional analysis or synthesis window.
///
/// Compactly supported kinds return exactly zero for |s| >= support_radius().
/// `bump(a)` is exp(1 - a^2 / (a^2 - s^2)) on (-a, a), so bump(0) = 1 and it
/// is C-infinity. `hann(a)` is cos^2(pi s / 2a) on (-a, a) and only C^1.
/// `custom` linearly interpolates a sampled 1-D field and is zero outside it.
class Window {
 public:
  enum class Kind { gaussian, hann, bump, custom };

  static Window gaussian(double sigma);
  static Window hann(double radius);
  static Window bump(double radius);
  /// `source` is recorded as the grammar path (e.g. the JSON file it came from).
  static Window custom(SampledField samples, std::string source = {});

  /// Parses `gaussian:sigma=1.0` (also `σ=`), `hann:a=2`, `bump:a=1.5` or
  /// `custom:path.json`. Throws Errc::parse naming the offending token.
  static Window parse(std::string_view spec);

  Kind kind() const noexcept { return kind_; }
  /// sigma for gaussian, radius a for hann/bump, 0 for custom.
  double parameter() const noexcept { return parameter_; }
  Complex operator()(double s) const noexcept;
  double support_radius() const noexcept;
  bool compact() const noexcept { return support_radius() < std::numeric_limits<double>::infinity(); }
  /// True for kinds in D(R) (or S(R) for gaussian): everything except hann and custom.
  bool smooth() const noexcept { return kind_ == Kind::gaussian || kind_ == Kind::bump; }
  Complex center_value() const noexcept { return (*this)(0.0); }
  bool real_valued() const noexcept;

  /// Canonical grammar string; parse(grammar()) reproduces the window for
  /// analytic kinds.
  std::string grammar() const;

  /// Half-width of the interval used to integrate this window numerically.
  double quadrature_radius() const noexcept;

 private:
  Kind kind_ = Kind::gaussian;
  double parameter_ = 1.0;
  std::shared_ptr<const SampledField> samples_;
  std::string source_;
};

/// Analysis windows g_1..g_k paired with synthesis windows psi_1..psi_k.
struct WindowBank {
  std::vector<Window> analysis;
  std::vector<Window> synthesis;

  WindowBank() = default;
  /// Throws Errc::invalid_argument when the two lists differ in length or are empty.
  WindowBank(std::vector<Window> analysis, std::vector<Window> synthesis);
  /// Same window used for analysis and synthesis.
  static WindowBank self_dual(std::vector<Window> windows);

  std::size_t k() const noexcept { return analysis.size(); }
};

inline constexpr double kDefaultPairingFloor = 1e-8;

/// 1-D quadrature lattice covering the joint support of every window in the bank
/// (8 sigma for gaussians, the sample box for custom windows).
Lattice pairing_lattice(const WindowBank& bank, double step = 1.0 / 1024.0);

/// prod_i (g_i, psi_i) = prod_i integral g_i conj(psi_i), by the library quadrature.
/// Throws Errc::pairing_degenerate when the magnitude is below `floor`.
Complex pairing(const WindowBank& bank, const Lattice& quad_lattice,
                double floor = kDefaultPairingFloor);
Complex pairing(const WindowBank& bank, double floor = kDefaultPairingFloor);

/// Integral of a(s) * conj(b(s)) over a 1-D quadrature lattice.
Complex window_inner_product(const Window& a, const Window& b, const Lattice& quad_lattice);

/// g^k_{u^k, x^k, xi}(t) = prod_i w_i(u_i . t - x_i) * exp(2 pi i t . xi).
Complex eval_ridge_atom(std::span<const Window> windows, const DirectionFrame& frame,
                        std::span<const double> shift, std::span<const double> xi,
                        std::span<const double> t);

}  // namespace dstft
