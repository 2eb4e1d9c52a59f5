#include "dstft/windowchange.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "dstft/error.hpp"
#include "dstft/fft.hpp"

namespace dstft {

namespace {

bool same_step(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

double effective_radius(const Window& w) {
  if (w.compact()) return w.support_radius();
  if (w.kind() == Window::Kind::gaussian) return 4.0 * w.parameter();
  return w.quadrature_radius();
}

// Row-major flat index of `idx` (with per-axis offset) inside `dims`.
std::size_t padded_flat(const MultiIndex& idx, std::span<const std::size_t> offset,
                        std::span<const std::size_t> dims) {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dims.size(); ++a) flat = flat * dims[a] + idx[a] + offset[a];
  return flat;
}

MultiIndex unflatten(std::size_t flat, std::span<const std::size_t> dims) {
  MultiIndex idx(dims.size());
  for (std::size_t a = dims.size(); a-- > 0;) {
    idx[a] = flat % dims[a];
    flat /= dims[a];
  }
  return idx;
}

std::size_t product(std::span<const std::size_t> v) {
  std::size_t p = 1;
  for (auto x : v) p *= x;
  return p;
}

}  // namespace

double kernel_radius(std::span<const Window> h, std::span<const Window> gamma) {
  if (h.size() != gamma.size()) throw Error(Errc::dimension_mismatch, "h and gamma differ in length");
  double r = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) r = std::max(r, effective_radius(h[i]) + effective_radius(gamma[i]));
  return r;
}

Lattice difference_lattice(const Lattice& shifts, double radius) {
  std::vector<double> origin(shifts.dim()), step = shifts.step();
  std::vector<std::size_t> count(shifts.dim());
  for (std::size_t a = 0; a < shifts.dim(); ++a) {
    const auto span = shifts.count()[a] - 1;
    const auto j = std::min<std::size_t>(span, static_cast<std::size_t>(std::floor(radius / step[a] + 1e-9)));
    origin[a] = -static_cast<double>(j) * step[a];
    count[a] = 2 * j + 1;
  }
  return Lattice::make(std::move(origin), std::move(step), std::move(count));
}

CoefficientField cross_kernel(std::span<const Window> h, std::span<const Window> gamma,
                              const Lattice& difference, const FrequencyLattice& freq,
                              const Execution& exec) {
  const std::size_t k = h.size();
  if (gamma.size() != k || k == 0) throw Error(Errc::dimension_mismatch, "h and gamma differ in length");
  if (difference.dim() != k || freq.dim() < k) {
    throw Error(Errc::dimension_mismatch, "kernel lattices do not match the window count");
  }
  std::vector<double> origin(k), step(k);
  std::vector<std::size_t> count(k);
  for (std::size_t a = 0; a < k; ++a) {
    const double delta = freq.signal_step()[a];
    const std::size_t n = freq.count()[a];
    step[a] = delta / 2.0;
    count[a] = 2 * n;
    origin[a] = -static_cast<double>(n) * delta / 2.0;
  }
  const Lattice lat = Lattice::make(std::move(origin), std::move(step), std::move(count));
  const auto field = SampledField::from_function(lat, [&](const std::vector<double>& p) {
    Complex v{1.0, 0.0};
    for (std::size_t a = 0; a < k; ++a) v *= gamma[a](p[a]);
    return v;
  }, "gamma");
  return dstft_forward(field, canonical_frame(k, k),
                       WindowBank({h.begin(), h.end()}, {gamma.begin(), gamma.end()}), difference, exec);
}

WindowChangeResult window_change(const CoefficientField& coeffs, const CoefficientField& kernel,
                                 const Execution& exec) {
  const std::size_t k = coeffs.frame.k();
  const std::size_t n = coeffs.frame.n();
  if (!coeffs.frame.canonical()) {
    throw Error(Errc::invalid_argument, "window change needs coefficients on the canonical frame");
  }
  if (kernel.frame.k() != k || kernel.frame.n() != k) {
    throw Error(Errc::lattice_mismatch, "kernel must be a " + std::to_string(k) + "-D transform");
  }
  std::vector<std::size_t> head(k), kdims(k), pad(k), radius(k);
  for (std::size_t a = 0; a < k; ++a) {
    head[a] = coeffs.freq_lattice.count()[a];
    kdims[a] = kernel.freq_lattice.count()[a];
    pad[a] = 3 * head[a];
    if (kdims[a] != 2 * head[a] || !same_step(kernel.freq_lattice.step(a), coeffs.freq_lattice.step(a))) {
      throw Error(Errc::lattice_mismatch, "kernel frequency bins must double the coefficient bins at equal step");
    }
    const auto& ks = kernel.shift_lattice;
    if (!same_step(ks.step()[a], coeffs.shift_lattice.step()[a]) || ks.count()[a] % 2 == 0 ||
        std::abs(ks.origin()[a] + ks.step()[a] * static_cast<double>(ks.count()[a] / 2)) > 1e-9 * ks.step()[a]) {
      throw Error(Errc::lattice_mismatch, "kernel shifts must be centered differences of the coefficient shifts");
    }
    radius[a] = ks.count()[a] / 2;
  }
  std::vector<std::size_t> tail_dims(coeffs.freq_lattice.count().begin() + static_cast<std::ptrdiff_t>(k),
                                     coeffs.freq_lattice.count().end());
  const std::size_t heads = product(head);
  const std::size_t tails = product(tail_dims);
  const std::size_t padded = product(pad);
  const std::size_t shifts = coeffs.shift_size();
  const std::size_t kernel_shifts = kernel.shift_size();
  const std::size_t kernel_bins = kernel.freq_size();

  std::vector<std::size_t> in_pos(heads), out_pos(heads), kernel_pos(kernel_bins);
  const std::vector<std::size_t> zero(k, 0);
  for (std::size_t i = 0; i < heads; ++i) {
    const auto idx = unflatten(i, head);
    in_pos[i] = padded_flat(idx, zero, pad);
    out_pos[i] = padded_flat(idx, head, pad);
  }
  for (std::size_t q = 0; q < kernel_bins; ++q) kernel_pos[q] = padded_flat(unflatten(q, kdims), zero, pad);

  // Per shift and axis: exp(2 pi i x_a xi_a) for every head bin on that axis.
  auto twist = [&](std::size_t s, double sign) {
    const auto x = coeffs.shift_lattice.point_at(s);
    std::vector<Complex> out(heads);
    for (std::size_t i = 0; i < heads; ++i) {
      const auto idx = unflatten(i, head);
      double phase = 0.0;
      for (std::size_t a = 0; a < k; ++a) phase += x[a] * coeffs.freq_lattice.frequency(a, idx[a]);
      out[i] = std::polar(1.0, sign * 2.0 * std::numbers::pi * phase);
    }
    return out;
  };

  const FftPlan forward(pad, FftPlan::Direction::forward);
  const FftPlan backward(pad, FftPlan::Direction::backward);

  std::vector<std::vector<Complex>> kernel_hat(kernel_shifts);
  detail::parallel_blocks(kernel_shifts, exec.threads, [&](std::size_t b, std::size_t e, unsigned) {
    FftBuffer buf(padded);
    for (std::size_t d = b; d < e; ++d) {
      buf.fill_zero();
      const auto src = kernel.slice(d);
      bool any = false;
      for (std::size_t q = 0; q < kernel_bins; ++q) {
        buf[kernel_pos[q]] = src[q];
        any = any || src[q] != Complex{};
      }
      if (!any) continue;
      forward.execute(buf);
      kernel_hat[d].assign(buf.data(), buf.data() + padded);
    }
  });

  // spectrum_hat[s * tails + t] = FFT of F(x_s, ., t) e^{2 pi i x_s . xi^k}, zero padded.
  std::vector<std::vector<Complex>> spectrum_hat(shifts * tails);
  std::vector<std::vector<Complex>> out_phase(shifts);
  detail::parallel_blocks(shifts, exec.threads, [&](std::size_t b, std::size_t e, unsigned) {
    FftBuffer buf(padded);
    for (std::size_t s = b; s < e; ++s) {
      const auto in_phase = twist(s, +1.0);
      out_phase[s] = twist(s, -1.0);
      const auto src = coeffs.slice(s);
      for (std::size_t t = 0; t < tails; ++t) {
        buf.fill_zero();
        bool any = false;
        for (std::size_t i = 0; i < heads; ++i) {
          const Complex v = src[i * tails + t];
          buf[in_pos[i]] = v * in_phase[i];
          any = any || v != Complex{};
        }
        if (!any) continue;
        forward.execute(buf);
        spectrum_hat[s * tails + t].assign(buf.data(), buf.data() + padded);
      }
    }
  });

  WindowChangeResult result;
  CoefficientField& out = result.field;
  out.frame = coeffs.frame;
  out.bank = WindowBank(kernel.bank.analysis, kernel.bank.synthesis);
  out.shift_lattice = coeffs.shift_lattice;
  out.freq_lattice = coeffs.freq_lattice;
  out.signal_origin = coeffs.signal_origin;
  out.provenance = Provenance::window_change;
  out.values.assign(coeffs.values.size(), Complex{});

  double weight = coeffs.shift_lattice.cell_volume() / static_cast<double>(padded);
  for (std::size_t a = 0; a < k; ++a) weight *= coeffs.freq_lattice.step(a);

  const auto& shift_count = coeffs.shift_lattice.count();
  detail::parallel_blocks(shifts, exec.threads, [&](std::size_t b, std::size_t e, unsigned) {
    FftBuffer buf(padded);
    std::vector<Complex> acc(heads);
    for (std::size_t y = b; y < e; ++y) {
      const auto yi = unflatten(y, shift_count);
      for (std::size_t t = 0; t < tails; ++t) {
        std::fill(acc.begin(), acc.end(), Complex{});
        // x visited in flat order: the accumulation order is fixed.
        for (std::size_t x = 0; x < shifts; ++x) {
          const auto& spec = spectrum_hat[x * tails + t];
          if (spec.empty()) continue;
          const auto xi = unflatten(x, shift_count);
          std::size_t d = 0;
          bool inside = true;
          for (std::size_t a = 0; a < k && inside; ++a) {
            const long long diff = static_cast<long long>(yi[a]) - static_cast<long long>(xi[a]);
            if (std::llabs(diff) > static_cast<long long>(radius[a])) inside = false;
            d = d * kernel.shift_lattice.count()[a] + static_cast<std::size_t>(diff + static_cast<long long>(radius[a]));
          }
          if (!inside || kernel_hat[d].empty()) continue;
          const auto& ker = kernel_hat[d];
          for (std::size_t p = 0; p < padded; ++p) buf[p] = spec[p] * ker[p];
          backward.execute(buf);
          const auto& phase = out_phase[x];
          for (std::size_t i = 0; i < heads; ++i) acc[i] += buf[out_pos[i]] * phase[i];
        }
        Complex* dst = out.values.data() + y * out.freq_size();
        for (std::size_t i = 0; i < heads; ++i) dst[i * tails + t] = acc[i] * weight;
      }
    }
  });

  for (std::size_t a = 0; a < k; ++a) {
    const double margin = static_cast<double>(radius[a]) * coeffs.shift_lattice.step()[a];
    result.valid_lower.push_back(coeffs.shift_lattice.lower(a) + margin);
    result.valid_upper.push_back(coeffs.shift_lattice.upper(a) - margin);
  }
  double nyq = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) nyq = std::min(nyq, coeffs.freq_lattice.nyquist(a));
  result.valid_frequency = 0.5 * nyq;
  return result;
}

WindowChangeReport verify_window_change(const SampledField& f, const DirectionFrame& frame,
                                        const WindowBank& bank, std::span<const Window> h,
                                        const WindowChangeGrids& grids, const Execution& exec,
                                        double floor) {
  if (!frame.canonical()) throw Error(Errc::invalid_argument, "window change runs on the canonical frame only");
  if (h.size() != bank.k() || bank.k() != frame.k()) {
    throw Error(Errc::dimension_mismatch, "window counts disagree with the frame");
  }
  const std::span<const Window> gamma(bank.synthesis);

  WindowChangeReport report;
  report.pairing = pairing(WindowBank(bank.synthesis, bank.analysis), floor);

  const auto coeffs_g = dstft_forward(f, frame, WindowBank::self_dual(bank.analysis), grids.shifts, exec);
  const double radius = kernel_radius(h, gamma);
  const auto kernel = cross_kernel(h, gamma, difference_lattice(grids.shifts, radius), coeffs_g.freq_lattice, exec);
  const auto changed = window_change(coeffs_g, kernel, exec);
  const auto direct = dstft_forward(f, frame, WindowBank::self_dual({h.begin(), h.end()}), grids.shifts, exec);

  const std::size_t k = frame.k(), n = frame.n();
  std::vector<double> lo(k), hi(k);
  for (std::size_t a = 0; a < k; ++a) {
    lo[a] = grids.interior_radius >= 0.0 ? -grids.interior_radius : changed.valid_lower[a];
    hi[a] = grids.interior_radius >= 0.0 ? grids.interior_radius : changed.valid_upper[a];
  }
  double nyq = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) nyq = std::min(nyq, direct.freq_lattice.nyquist(a));
  const double limit = grids.frequency_fraction * nyq;

  std::vector<char> freq_mask(direct.freq_size());
  for (std::size_t c = 0; c < freq_mask.size(); ++c) {
    const auto xi = direct.freq_lattice.frequency_at(c);
    freq_mask[c] = std::all_of(xi.begin(), xi.end(), [&](double v) { return std::abs(v) <= limit + 1e-12; });
  }
  const Complex scale = 1.0 / report.pairing;
  double num = 0.0, den = 0.0, rhs = 0.0;
  for (std::size_t s = 0; s < direct.shift_size(); ++s) {
    const auto y = direct.shift_lattice.point_at(s);
    bool inside = true;
    for (std::size_t a = 0; a < k; ++a) inside = inside && y[a] >= lo[a] - 1e-12 && y[a] <= hi[a] + 1e-12;
    if (!inside) continue;
    const auto lhs_row = direct.slice(s);
    const auto rhs_row = changed.field.slice(s);
    for (std::size_t c = 0; c < freq_mask.size(); ++c) {
      if (!freq_mask[c]) continue;
      const Complex r = rhs_row[c] * scale;
      num += std::norm(r - lhs_row[c]);
      den += std::norm(lhs_row[c]);
      rhs += std::norm(r);
      ++report.scored_points;
    }
  }
  const double w = direct.shift_lattice.cell_volume() * direct.freq_lattice.cell_volume();
  report.lhs_norm = std::sqrt(den * w);
  report.rhs_norm = std::sqrt(rhs * w);
  if (den == 0.0) {
    report.rel_err = num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    report.rel_err = std::sqrt(num / den);
  }
  report.interior_lower = lo.empty() ? 0.0 : lo[0];
  report.interior_upper = hi.empty() ? 0.0 : hi[0];
  report.frequency_limit = limit;

  std::ostringstream desc;
  desc << "signal step " << f.lattice.step()[0] << " x " << f.lattice.count()[0] << ", shift step "
       << grids.shifts.step()[0] << " x " << grids.shifts.count()[0] << ", kernel radius " << radius
       << ", gamma lattice step " << f.lattice.step()[0] / 2 << " x " << 2 * f.lattice.count()[0]
       << ", scored |y| in [" << report.interior_lower << ", " << report.interior_upper << "], |eta| <= " << limit;
  report.grids = desc.str();
  return report;
}

std::vector<ConvergenceRow> window_change_convergence(const ConvergenceSetup& setup, const DirectionFrame& frame,
                                                      const WindowBank& bank, std::span<const Window> h,
                                                      const Execution& exec) {
  const std::size_t n = frame.n(), k = frame.k();
  if (setup.box_lower.size() != n || setup.box_upper.size() != n) {
    throw Error(Errc::dimension_mismatch, "signal box must have one interval per axis");
  }
  std::vector<ConvergenceRow> rows;
  for (const auto& [delta, shift_step] : setup.levels) {
    std::vector<std::size_t> count(n);
    for (std::size_t a = 0; a < n; ++a) {
      count[a] = static_cast<std::size_t>(std::llround((setup.box_upper[a] - setup.box_lower[a]) / delta));
    }
    const auto lat = Lattice::make(setup.box_lower, std::vector<double>(n, delta), count);
    const auto f = SampledField::from_function(lat, [&](const std::vector<double>& t) { return setup.signal(t); });
    const auto shift_count = static_cast<std::size_t>(std::llround(2.0 * setup.shift_extent / shift_step)) + 1;
    WindowChangeGrids grids{Lattice::make(std::vector<double>(k, -setup.shift_extent),
                                          std::vector<double>(k, shift_step),
                                          std::vector<std::size_t>(k, shift_count)),
                            setup.interior_radius, 0.5};
    const auto report = verify_window_change(f, frame, bank, h, grids, exec);
    ConvergenceRow row{delta, shift_step, report.rel_err, std::numeric_limits<double>::quiet_NaN()};
    if (!rows.empty()) {
      row.order = std::log(rows.back().rel_err / row.rel_err) / std::log(rows.back().signal_step / delta);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  os << "signal_step,shift_step,rel_err,order\n" << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.signal_step << ',' << r.shift_step << ',' << r.rel_err << ',';
    if (std::isnan(r.order)) os << "";
    else os << r.order;
    os << '\n';
  }
  return os.str();
}

}  // namespace dstft
