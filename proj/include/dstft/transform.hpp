#pragma once

#include <span>
#include <string>
#include <vector>

#include "dstft/directions.hpp"
#include "dstft/execution.hpp"
#include "dstft/lattice.hpp"
#include "dstft/windows.hpp"

namespace dstft {

enum class Provenance { fast_fft, quadrature, window_change };
std::string to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

/// Multi-directional STFT values DS_{g^k,u^k} f(x^k, xi).
///
/// Storage is shift-major: values[shift_flat * freq_size() + freq_flat], where
/// freq_flat is the row-major index over centered frequency bins.
struct CoefficientField {
  DirectionFrame frame;
  WindowBank bank;
  Lattice shift_lattice;              // k-dimensional x^k grid
  FrequencyLattice freq_lattice;      // n-dimensional xi grid
  std::vector<double> signal_origin;  // origin of the analyzed signal lattice
  std::vector<Complex> values;
  Provenance provenance = Provenance::fast_fft;

  std::size_t shift_size() const noexcept { return shift_lattice.size(); }
  std::size_t freq_size() const noexcept { return freq_lattice.size(); }

  Complex& at(std::size_t shift_flat, std::size_t freq_flat) {
    return values[shift_flat * freq_size() + freq_flat];
  }
  const Complex& at(std::size_t shift_flat, std::size_t freq_flat) const {
    return values[shift_flat * freq_size() + freq_flat];
  }
  std::span<const Complex> slice(std::size_t shift_flat) const {
    return {values.data() + shift_flat * freq_size(), freq_size()};
  }

  /// The lattice the analyzed signal lived on (origin + dual steps/counts).
  Lattice signal_lattice() const;
};

/// Frequency with optional imaginary part, z = xi + i eta.
struct ComplexFrequencyPoint {
  std::vector<double> xi;
  std::vector<double> eta;
};

/// Default shift lattice: step 4 * (smallest signal step), covering the
/// projections u_i . t of the signal box.
Lattice default_shift_lattice(const Lattice& signal, const DirectionFrame& frame);

/// Forward transform on the FFT path. For every shift x^k the windowed product
/// f(t) prod conj(g_i(u_i . t - x_i)) is formed pointwise on f's lattice and
/// transformed with weight Delta^n and phase exp(-2 pi i t0 . xi).
CoefficientField dstft_forward(const SampledField& f, const DirectionFrame& frame,
                               const WindowBank& bank, const Lattice& shift_lattice,
                               const Execution& exec = {});

inline constexpr double kMaxExponent = 700.0;

/// Direct Riemann quadrature of the transform at arbitrary x^k and complex
/// frequency xi + i eta (kernel weighted by exp(2 pi t . eta)). O(size of f).
/// Throws Errc::eta_too_large when |2 pi t . eta| exceeds 700 on the box.
Complex dstft_at(const SampledField& f, const DirectionFrame& frame,
                 std::span<const Window> windows, std::span<const double> shift,
                 const ComplexFrequencyPoint& z);

/// Riemann-sum synthesis operator
///   f_out(t) = sum_x sum_xi c(x, xi) psi^k_{u^k, x, xi}(t) dx^k dxi^n.
/// `out_lattice` must have the steps and counts the frequency lattice is dual
/// to; its origin is free.
SampledField synthesis(const CoefficientField& coeffs, std::span<const Window> synthesis_windows,
                       const Lattice& out_lattice, const Execution& exec = {});

/// synthesis(coeffs, bank.synthesis) / prod_i (psi_i, g_i).
/// Throws Errc::pairing_degenerate below `floor`.
SampledField invert(const CoefficientField& coeffs, const WindowBank& bank,
                    const Lattice& out_lattice, const Execution& exec = {},
                    double floor = kDefaultPairingFloor);

struct ParsevalReport {
  Complex lhs;
  Complex rhs;
  double rel_err = 0.0;  // |lhs - rhs| / |rhs|; NaN when rhs is degenerate
  double abs_err = 0.0;  // |lhs - rhs|
  double scale = 0.0;    // ||f1|| ||f2|| prod ||g_i|| ||psi_i||
  bool rhs_degenerate = false;
};

/// Both sides of the Parseval identity on the canonical frame e^k:
///   lhs = dx^k dxi^n sum DS_g f1 conj(DS_psi f2),
///   rhs = (f1, f2) prod_i (conj g_i, conj psi_i).
/// `bank.analysis` supplies g, `bank.synthesis` supplies psi. The rhs is
/// flagged degenerate (relative error undefined) when |rhs| <= 1e-12 * scale.
ParsevalReport parseval_check(const SampledField& f1, const SampledField& f2,
                              const WindowBank& bank, const DirectionFrame& frame,
                              const Lattice& shift_lattice, const Execution& exec = {});

/// Relative L2 distance between two coefficient fields with equal shapes.
double relative_l2_error(const CoefficientField& a, const CoefficientField& reference);

}  // namespace dstft
