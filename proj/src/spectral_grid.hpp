#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "dstft/lattice.hpp"

namespace dstft::detail {

// Maps centered frequency bins of a lattice to FFT storage order and holds
// the per-bin phase exp(sign * 2 pi i t0 . xi).
struct SpectralGrid {
  std::vector<std::size_t> fft_index;  // centered flat -> FFT flat
  std::vector<Complex> phase;          // per centered flat

  SpectralGrid(const FrequencyLattice& freq, const std::vector<double>& origin, double sign) {
    const std::size_t n = freq.dim();
    const std::size_t total = freq.size();
    std::vector<std::vector<Complex>> axis_phase(n);
    std::vector<std::vector<std::size_t>> axis_fft(n);
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t count = freq.count()[a];
      axis_phase[a].resize(count);
      axis_fft[a].resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const long long m = freq.bin(a, i);
        const long long cnt = static_cast<long long>(count);
        axis_fft[a][i] = static_cast<std::size_t>(((m % cnt) + cnt) % cnt);
        axis_phase[a][i] = std::polar(1.0, sign * 2.0 * std::numbers::pi * origin[a] * freq.frequency(a, i));
      }
    }
    fft_index.resize(total);
    phase.resize(total);
    MultiIndex idx(n, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t f = 0;
      Complex p{1.0, 0.0};
      for (std::size_t a = 0; a < n; ++a) {
        f = f * freq.count()[a] + axis_fft[a][idx[a]];
        p *= axis_phase[a][idx[a]];
      }
      fft_index[flat] = f;
      phase[flat] = p;
      for (std::size_t a = n; a-- > 0;) {
        if (++idx[a] < freq.count()[a]) break;
        idx[a] = 0;
      }
    }
  }
};

}  // namespace dstft::detail
