#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dstft/transform.hpp"

namespace dstft {

/// Kernel K(s^k, zeta^k) = DS_{h^k,e^k} gamma^k, with gamma^k = gamma_1 (x) ... (x) gamma_k
/// sampled as a k-dimensional signal.
///
/// gamma is rendered on a lattice of step Delta/2 with 2N points per axis,
/// centered at the origin, so the kernel's frequency bins have the same step
/// as `freq` and cover every difference eta - xi of two bins of `freq`.
/// Only the first k axes of `freq` are used.
CoefficientField cross_kernel(std::span<const Window> h, std::span<const Window> gamma,
                              const Lattice& difference_lattice, const FrequencyLattice& freq,
                              const Execution& exec = {});

/// All shift differences y - x of `shifts` whose magnitude on every axis is
/// at most `radius`.
Lattice difference_lattice(const Lattice& shifts, double radius);

/// Shift radius beyond which the kernel is treated as zero: support radii of
/// h and gamma, with 4 sigma standing in for a gaussian.
double kernel_radius(std::span<const Window> h, std::span<const Window> gamma);

struct WindowChangeResult {
  CoefficientField field;          // same lattices as the input coefficients
  std::vector<double> valid_lower;  // per shift axis, inclusive
  std::vector<double> valid_upper;
  double valid_frequency = 0.0;     // |eta_a| bound on every axis
};

/// out(y, eta) = sum_x sum_xi F(x, xi) K(y - x, eta^k - xi^k) e^{-2 pi i x.(eta^k - xi^k)} dx^k dxi^k
///
/// Linear (zero-padded) convolution over the k window frequency axes; the
/// remaining n - k frequency axes pass through unchanged, the discrete form
/// of the delta those axes produce. The exponential twist carries the
/// translation x of the synthesis atom into frequency. The result equals
/// (gamma^k, g^k) DS_{h^k} f where F = DS_{g^k} f and the kernel was built
/// from gamma^k and h^k.
WindowChangeResult window_change(const CoefficientField& coeffs_g, const CoefficientField& kernel,
                                 const Execution& exec = {});

/// Grids used by the verification: shift lattice plus the scored region.
struct WindowChangeGrids {
  Lattice shifts;
  double interior_radius = -1.0;   // |y_a| bound; negative means derive from the kernel radius
  double frequency_fraction = 0.5; // scored |eta_a| <= fraction * Nyquist
};

struct WindowChangeReport {
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
  double rel_err = 0.0;
  Complex pairing;               // (gamma^k, g^k)
  std::size_t scored_points = 0;
  double interior_lower = 0.0;   // scored shift box, per axis
  double interior_upper = 0.0;
  double frequency_limit = 0.0;
  std::string grids;             // human-readable description
};

/// Computes DS_h f directly and through the window-change identity from
/// DS_g f, then scores the relative L2 gap on the interior region.
/// `bank.analysis` holds g^k and `bank.synthesis` holds gamma^k; the frame
/// must be canonical. Throws Errc::pairing_degenerate when (gamma, g) is
/// below `floor`.
WindowChangeReport verify_window_change(const SampledField& f, const DirectionFrame& frame,
                                        const WindowBank& bank, std::span<const Window> h,
                                        const WindowChangeGrids& grids, const Execution& exec = {},
                                        double floor = kDefaultPairingFloor);

struct ConvergenceRow {
  double signal_step = 0.0;
  double shift_step = 0.0;
  double rel_err = 0.0;
  double order = 0.0;  // log2 of the error ratio to the previous row; NaN on the first
};

struct ConvergenceSetup {
  std::function<Complex(std::span<const double>)> signal;
  std::vector<double> box_lower;   // signal box per axis, [lower, upper)
  std::vector<double> box_upper;
  double shift_extent = 6.0;       // shifts cover [-extent, extent] on each axis
  double interior_radius = 4.0;
  std::vector<std::pair<double, double>> levels;  // (signal step, shift step)
};

/// Runs verify_window_change at each level and reports the empirical order.
std::vector<ConvergenceRow> window_change_convergence(const ConvergenceSetup& setup,
                                                      const DirectionFrame& frame,
                                                      const WindowBank& bank,
                                                      std::span<const Window> h,
                                                      const Execution& exec = {});

std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace dstft
