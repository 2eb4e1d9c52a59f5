#include "dstft/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dstft/error.hpp"
#include "dstft/fft.hpp"
#include "spectral_grid.hpp"

namespace dstft {

namespace {

void check_frame(const DirectionFrame& frame, std::size_t windows, std::size_t signal_dim) {
  if (windows != frame.k()) {
    throw Error(Errc::dimension_mismatch, "bank has " + std::to_string(windows) +
                                              " windows for " + std::to_string(frame.k()) + " directions");
  }
  if (signal_dim != frame.n()) {
    throw Error(Errc::dimension_mismatch, "signal is " + std::to_string(signal_dim) +
                                              "-D but the frame lives in R^" + std::to_string(frame.n()));
  }
}

// proj[i * size + flat] = u_i . t(flat)
std::vector<double> projections(const Lattice& lat, const DirectionFrame& frame) {
  const std::size_t size = lat.size();
  std::vector<double> proj(frame.k() * size);
  for (std::size_t flat = 0; flat < size; ++flat) {
    const auto t = lat.point_at(flat);
    for (std::size_t i = 0; i < frame.k(); ++i) proj[i * size + flat] = frame.project(i, t);
  }
  return proj;
}

// prod_i w_i(proj_i - x_i), conjugated when requested.
Complex window_product(std::span<const Window> windows, const std::vector<double>& proj,
                       std::size_t size, std::size_t flat, std::span<const double> shift,
                       bool conjugate) {
  Complex w{1.0, 0.0};
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Complex v = windows[i](proj[i * size + flat] - shift[i]);
    w *= conjugate ? std::conj(v) : v;
    if (w == Complex{}) break;
  }
  return w;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::fast_fft: return "fast_fft";
    case Provenance::quadrature: return "quadrature";
    case Provenance::window_change: return "window_change";
  }
  return "unknown";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "fast_fft") return Provenance::fast_fft;
  if (s == "quadrature") return Provenance::quadrature;
  if (s == "window_change") return Provenance::window_change;
  throw Error(Errc::parse, "unknown provenance '" + std::string(s) + "'");
}

Lattice CoefficientField::signal_lattice() const {
  return Lattice::make(signal_origin, freq_lattice.signal_step(), freq_lattice.count());
}

Lattice default_shift_lattice(const Lattice& signal, const DirectionFrame& frame) {
  const double step = 4.0 * *std::min_element(signal.step().begin(), signal.step().end());
  const std::size_t n = frame.n();
  const std::size_t corners = std::size_t{1} << n;
  std::vector<double> origin(frame.k());
  std::vector<std::size_t> count(frame.k());
  for (std::size_t i = 0; i < frame.k(); ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t c = 0; c < corners; ++c) {
      std::vector<double> t(n);
      for (std::size_t a = 0; a < n; ++a) t[a] = (c >> a) & 1u ? signal.upper(a) : signal.lower(a);
      const double p = frame.project(i, t);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    origin[i] = std::floor(lo / step) * step;
    count[i] = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((hi - origin[i]) / step)) + 1);
  }
  return Lattice::make(std::move(origin), std::vector<double>(frame.k(), step), std::move(count));
}

CoefficientField dstft_forward(const SampledField& f, const DirectionFrame& frame,
                               const WindowBank& bank, const Lattice& shift_lattice,
                               const Execution& exec) {
  check_frame(frame, bank.k(), f.lattice.dim());
  if (shift_lattice.dim() != frame.k()) {
    throw Error(Errc::dimension_mismatch, "shift lattice must be " + std::to_string(frame.k()) + "-D");
  }
  const Lattice& lat = f.lattice;
  const std::size_t size = lat.size();

  CoefficientField out;
  out.frame = frame;
  out.bank = bank;
  out.shift_lattice = shift_lattice;
  out.freq_lattice = lat.dual();
  out.signal_origin = lat.origin();
  out.provenance = Provenance::fast_fft;
  out.values.assign(shift_lattice.size() * size, Complex{});

  const detail::SpectralGrid grid(out.freq_lattice, lat.origin(), -1.0);
  const auto proj = projections(lat, frame);
  const FftPlan plan(lat.count(), FftPlan::Direction::forward);
  const double weight = lat.cell_volume();
  const std::span<const Window> windows(bank.analysis);

  detail::parallel_blocks(shift_lattice.size(), exec.threads,
                          [&](std::size_t begin, std::size_t end, unsigned) {
    FftBuffer buffer(size);
    for (std::size_t s = begin; s < end; ++s) {
      const auto x = shift_lattice.point_at(s);
      for (std::size_t flat = 0; flat < size; ++flat) {
        const Complex w = window_product(windows, proj, size, flat, x, true);
        buffer[flat] = w == Complex{} ? Complex{} : f.values[flat] * w;
      }
      plan.execute(buffer);
      Complex* dst = out.values.data() + s * size;
      for (std::size_t c = 0; c < size; ++c) dst[c] = weight * grid.phase[c] * buffer[grid.fft_index[c]];
    }
  });
  return out;
}

Complex dstft_at(const SampledField& f, const DirectionFrame& frame, std::span<const Window> windows,
                 std::span<const double> shift, const ComplexFrequencyPoint& z) {
  check_frame(frame, windows.size(), f.lattice.dim());
  const std::size_t n = frame.n();
  if (shift.size() != frame.k()) throw Error(Errc::dimension_mismatch, "shift has wrong dimension");
  if (z.xi.size() != n) throw Error(Errc::dimension_mismatch, "frequency has wrong dimension");
  std::vector<double> eta = z.eta.empty() ? std::vector<double>(n, 0.0) : z.eta;
  if (eta.size() != n) throw Error(Errc::dimension_mismatch, "imaginary frequency has wrong dimension");

  const Lattice& lat = f.lattice;
  const std::size_t corners = std::size_t{1} << n;
  for (std::size_t c = 0; c < corners; ++c) {
    double dot = 0.0;
    for (std::size_t a = 0; a < n; ++a) dot += ((c >> a) & 1u ? lat.upper(a) : lat.lower(a)) * eta[a];
    if (std::abs(2.0 * std::numbers::pi * dot) > kMaxExponent) {
      throw Error(Errc::eta_too_large, "exp(2 pi t.eta) would overflow on the signal box");
    }
  }

  Complex acc{};
  for (std::size_t flat = 0; flat < lat.size(); ++flat) {
    if (f.values[flat] == Complex{}) continue;
    const auto t = lat.point_at(flat);
    Complex w{1.0, 0.0};
    for (std::size_t i = 0; i < frame.k(); ++i) w *= std::conj(windows[i](frame.project(i, t) - shift[i]));
    if (w == Complex{}) continue;
    double phase = 0.0, growth = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      phase += t[a] * z.xi[a];
      growth += t[a] * eta[a];
    }
    acc += f.values[flat] * w * std::polar(std::exp(2.0 * std::numbers::pi * growth),
                                           -2.0 * std::numbers::pi * phase);
  }
  return acc * lat.cell_volume();
}

SampledField synthesis(const CoefficientField& coeffs, std::span<const Window> synthesis_windows,
                       const Lattice& out_lattice, const Execution& exec) {
  const auto& frame = coeffs.frame;
  check_frame(frame, synthesis_windows.size(), out_lattice.dim());
  if (!coeffs.freq_lattice.is_dual_of(out_lattice)) {
    throw Error(Errc::lattice_mismatch,
                "output lattice steps/counts must match the lattice the frequency grid is dual to");
  }
  const std::size_t size = out_lattice.size();
  const std::size_t shifts = coeffs.shift_size();
  const detail::SpectralGrid grid(coeffs.freq_lattice, out_lattice.origin(), +1.0);
  const auto proj = projections(out_lattice, frame);
  const FftPlan plan(out_lattice.count(), FftPlan::Direction::backward);
  const double freq_weight = coeffs.freq_lattice.cell_volume();
  const double shift_weight = coeffs.shift_lattice.cell_volume();

  SampledField out(out_lattice, "synthesis");

  // One shift slice: inverse DFT of the phased coefficients times the atom windows.
  auto slice_into = [&](std::size_t s, FftBuffer& buffer) {
    const auto src = coeffs.slice(s);
    for (std::size_t c = 0; c < size; ++c) buffer[grid.fft_index[c]] = src[c] * grid.phase[c];
    plan.execute(buffer);
    const auto x = coeffs.shift_lattice.point_at(s);
    for (std::size_t flat = 0; flat < size; ++flat) {
      const Complex w = window_product(synthesis_windows, proj, size, flat, x, false);
      buffer[flat] = w == Complex{} ? Complex{} : buffer[flat] * w;
    }
  };

  const unsigned workers = std::max(1u, exec.threads);
  if (exec.deterministic || workers == 1) {
    // Slices are produced in parallel in batches and added in shift order,
    // so the sum per output point does not depend on the worker count.
    std::vector<FftBuffer> buffers;
    for (unsigned w = 0; w < workers; ++w) buffers.emplace_back(size);
    for (std::size_t base = 0; base < shifts; base += workers) {
      const std::size_t batch = std::min<std::size_t>(workers, shifts - base);
      detail::parallel_blocks(batch, workers, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t j = b; j < e; ++j) slice_into(base + j, buffers[j]);
      });
      for (std::size_t j = 0; j < batch; ++j) {
        for (std::size_t flat = 0; flat < size; ++flat) out.values[flat] += buffers[j][flat];
      }
    }
  } else {
    std::vector<std::vector<Complex>> partial(workers);
    detail::parallel_blocks(shifts, workers, [&](std::size_t b, std::size_t e, unsigned w) {
      FftBuffer buffer(size);
      auto& acc = partial[w];
      acc.assign(size, Complex{});
      for (std::size_t s = b; s < e; ++s) {
        slice_into(s, buffer);
        for (std::size_t flat = 0; flat < size; ++flat) acc[flat] += buffer[flat];
      }
    });
    for (const auto& acc : partial) {
      if (acc.empty()) continue;
      for (std::size_t flat = 0; flat < size; ++flat) out.values[flat] += acc[flat];
    }
  }
  const double weight = freq_weight * shift_weight;
  for (auto& v : out.values) v *= weight;
  return out;
}

SampledField invert(const CoefficientField& coeffs, const WindowBank& bank, const Lattice& out_lattice,
                    const Execution& exec, double floor) {
  if (bank.k() != coeffs.frame.k()) {
    throw Error(Errc::dimension_mismatch, "bank does not match the coefficient frame");
  }
  const Complex p = pairing(bank, pairing_lattice(bank), floor);
  auto out = synthesis(coeffs, bank.synthesis, out_lattice, exec);
  const Complex scale = 1.0 / std::conj(p);
  for (auto& v : out.values) v *= scale;
  out.label = "reconstruction";
  return out;
}

ParsevalReport parseval_check(const SampledField& f1, const SampledField& f2, const WindowBank& bank,
                              const DirectionFrame& frame, const Lattice& shift_lattice,
                              const Execution& exec) {
  if (!frame.canonical()) {
    throw Error(Errc::invalid_argument, "the Parseval check runs on the canonical frame e^k only");
  }
  if (!(f1.lattice == f2.lattice)) throw Error(Errc::lattice_mismatch, "Parseval inputs must share a lattice");

  const auto c1 = dstft_forward(f1, frame, WindowBank::self_dual(bank.analysis), shift_lattice, exec);
  const auto c2 = dstft_forward(f2, frame, WindowBank::self_dual(bank.synthesis), shift_lattice, exec);
  Complex acc{};
  for (std::size_t i = 0; i < c1.values.size(); ++i) acc += c1.values[i] * std::conj(c2.values[i]);

  ParsevalReport report;
  report.lhs = acc * shift_lattice.cell_volume() * c1.freq_lattice.cell_volume();

  const Lattice quad = pairing_lattice(bank);
  Complex windows{1.0, 0.0};
  double window_norms = 1.0;
  for (std::size_t i = 0; i < bank.k(); ++i) {
    const auto& g = bank.analysis[i];
    const auto& psi = bank.synthesis[i];
    Complex pair{};
    double gg = 0.0, pp = 0.0;
    for (std::size_t j = 0; j < quad.count()[0]; ++j) {
      const double s = quad.coordinate(0, j);
      const Complex gv = g(s), pv = psi(s);
      pair += std::conj(gv) * pv;  // (conj g, conj psi)
      gg += std::norm(gv);
      pp += std::norm(pv);
    }
    const double h = quad.step()[0];
    windows *= pair * h;
    window_norms *= std::sqrt(gg * h) * std::sqrt(pp * h);
  }
  report.rhs = inner_product(f1, f2) * windows;
  report.scale = f1.norm_l2() * f2.norm_l2() * window_norms;
  report.abs_err = std::abs(report.lhs - report.rhs);
  report.rhs_degenerate = !(std::abs(report.rhs) > 1e-12 * report.scale);
  report.rel_err = report.rhs_degenerate ? std::numeric_limits<double>::quiet_NaN()
                                         : report.abs_err / std::abs(report.rhs);
  return report;
}

double relative_l2_error(const CoefficientField& a, const CoefficientField& reference) {
  if (a.values.size() != reference.values.size()) {
    throw Error(Errc::lattice_mismatch, "coefficient fields differ in shape");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - reference.values[i]);
    den += std::norm(reference.values[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

}  // namespace dstft
