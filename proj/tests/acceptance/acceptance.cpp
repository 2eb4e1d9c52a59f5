// One line per acceptance criterion; exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dstft/directions.hpp"
#include "dstft/error.hpp"
#include "dstft/signals.hpp"
#include "dstft/transform.hpp"
#include "dstft/wavefront.hpp"
#include "dstft/windowchange.hpp"

using namespace dstft;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += "; over the " + std::to_string(static_cast<int>(budget_s)) + " s budget";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double gauss(std::span<const double> t) {
  double r2 = 0.0;
  for (double v : t) r2 += v * v;
  return std::exp(-0.5 * r2);
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Lattice square(double lo, double delta, std::size_t n) { return Lattice::make({lo, lo}, {delta, delta}, {n, n}); }

Lattice line(double lo, double hi, double step) {
  return Lattice::make({lo}, {step}, {static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1});
}

// Wave-front corpus shared by criteria 6, 7 and 9.
constexpr double kCorpusDelta = 1.0 / 64.0;
constexpr std::size_t kCorpusN = 1024;
const std::vector<double> kCenters{-2.5, -2.0, -0.5, 0.0, 0.5, 2.0, 2.5};

WavefrontParams corpus_params() {
  WavefrontParams p;
  p.radius = 0.5;
  p.half_angle = kPi / 6.0;
  p.r_min = 4.0;
  p.r_max = 16.0;
  p.shells = 8;
  p.shift_step = 0.25;
  p.thresholds.n_threshold = 2.0;
  return p;
}

std::vector<std::vector<double>> centers_of(const std::vector<double>& c) {
  std::vector<std::vector<double>> out;
  for (double v : c) out.push_back({v});
  return out;
}

SampledField jump_corpus() {
  return SampledField::from_function(square(-8.0, kCorpusDelta, kCorpusN), [](const std::vector<double>& t) {
    return Complex{sgn(t[0]) * gauss(t), 0.0};
  });
}

// Singular exactly when the ball's slab meets t1 = 0 and the axis lies within theta of +-e1.
bool skeleton(double center, std::span<const double> axis, double r, double a, double theta) {
  return std::abs(center) < r + a && std::abs(axis[0]) >= std::cos(theta) - 1e-12;
}

// Decay order of sign(t1) G(t) windowed along t1 by bump(a), from a separable direct sum:
// the coefficient is H(x, xi1) * Ghat(xi2) with both factors summed on the 1-D grid.
double heaviside_oracle(double center, std::span<const double> axis, double a, const WavefrontParams& p) {
  const std::size_t n = kCorpusN;
  const double delta = kCorpusDelta;
  const double dxi = 1.0 / (static_cast<double>(n) * delta);
  const auto bump = [a](double s) { return std::abs(s) < a ? std::exp(1.0 - a * a / (a * a - s * s)) : 0.0; };
  const long long mmax = static_cast<long long>(std::ceil(p.r_max / dxi));
  std::vector<double> xs;
  for (double x = center - p.radius; x <= center + p.radius + 1e-12; x += p.shift_step) xs.push_back(x);

  std::vector<double> ghat(2 * mmax + 1);
  for (long long m = -mmax; m <= mmax; ++m) {
    std::complex<double> acc{};
    for (std::size_t j = 0; j < n; ++j) {
      const double t = -8.0 + delta * static_cast<double>(j);
      acc += std::exp(-0.5 * t * t) * std::polar(1.0, -2.0 * kPi * t * static_cast<double>(m) * dxi);
    }
    ghat[m + mmax] = std::abs(acc * delta);
  }

  std::vector<double> edges;
  for (std::size_t j = 0; j <= p.shells; ++j) {
    edges.push_back(p.r_min * std::pow(p.r_max / p.r_min, static_cast<double>(j) / static_cast<double>(p.shells)));
  }
  std::vector<double> sup(p.shells, 0.0);
  for (double x : xs) {
    std::vector<double> h(2 * mmax + 1);
    for (long long m = -mmax; m <= mmax; ++m) {
      std::complex<double> acc{};
      for (std::size_t j = 0; j < n; ++j) {
        const double t = -8.0 + delta * static_cast<double>(j);
        const double w = bump(t - x);
        if (w == 0.0) continue;
        acc += sgn(t) * std::exp(-0.5 * t * t) * w * std::polar(1.0, -2.0 * kPi * t * static_cast<double>(m) * dxi);
      }
      h[m + mmax] = std::abs(acc * delta);
    }
    for (long long m1 = -mmax; m1 <= mmax; ++m1) {
      for (long long m2 = -mmax; m2 <= mmax; ++m2) {
        const double xi1 = static_cast<double>(m1) * dxi, xi2 = static_cast<double>(m2) * dxi;
        const double r = std::hypot(xi1, xi2);
        if (r < edges.front() || r >= edges.back()) continue;
        if (std::abs(xi1 * axis[0] + xi2 * axis[1]) < r * std::cos(p.half_angle)) continue;
        std::size_t shell = 0;
        while (r >= edges[shell + 1]) ++shell;
        sup[shell] = std::max(sup[shell], h[m1 + mmax] * ghat[m2 + mmax]);
      }
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t j = 0; j < p.shells; ++j) {
    if (!(sup[j] > p.thresholds.floor)) continue;
    const double X = 0.5 * std::log(1.0 + edges[j] * edges[j]), Y = std::log(sup[j]);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    m += 1;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

int main() {
  const auto frame_e1 = canonical_frame(1, 2);

  criterion(1, "fast path equals quadrature", 10.0, [&] {
    const auto lat = square(-8.0, 0.25, 64);
    const auto f = SampledField::from_function(lat, [](const std::vector<double>& t) { return Complex{gauss(t), 0.0}; });
    const std::vector<Window> g{Window::gaussian(1.0)};
    const auto shifts = line(-6.0, 6.0, 0.25);
    const auto c = dstft_forward(f, frame_e1, WindowBank::self_dual(g), shifts);
    std::mt19937_64 rng(20261018);
    std::uniform_int_distribution<std::size_t> ps(0, shifts.size() - 1), pb(0, c.freq_size() - 1);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const auto s = ps(rng), b = pb(rng);
      const auto q = dstft_at(f, frame_e1, g, shifts.point_at(s), {c.freq_lattice.frequency_at(b), {}});
      worst = std::max(worst, std::abs(c.at(s, b) - q) / (1.0 + std::abs(q)));
    }
    return Outcome{worst <= 1e-10, "max |fast - quad| / (1 + |quad|) = " + fmt(worst)};
  });

  criterion(2, "frame reduction", 60.0, [&] {
    const auto lat = square(-8.0, 1.0 / 64.0, 1024);
    const auto f = SampledField::from_function(lat, [](const std::vector<double>& t) { return Complex{gauss(t), 0.0}; });
    const double h = 1.0 / std::sqrt(2.0);
    const auto frame = build_frame({{h, h}}, 2);
    const std::vector<Window> g{Window::gaussian(1.0)};
    const auto shifts = line(-1.0, 1.0, 1.0);
    const auto direct = dstft_forward(f, frame, WindowBank::self_dual(g), shifts);
    const auto pushed = pushforward(f, frame, lat);
    double num = 0.0, den = 0.0;
    std::size_t points = 0;
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      for (long long m0 = -12; m0 <= 12; m0 += 3) {
        for (long long m1 = -12; m1 <= 12; m1 += 3) {
          const std::vector<std::size_t> idx{direct.freq_lattice.centered_index(0, m0).value(),
                                             direct.freq_lattice.centered_index(1, m1).value()};
          const std::size_t b = direct.freq_lattice.flat_index(idx);
          const auto xi = direct.freq_lattice.frequency_at(b);
          const auto eta = pullback_frequency(frame, xi);
          const auto via = dstft_at(pushed, frame_e1, g, shifts.point_at(s), {eta, {}});
          num += std::norm(direct.at(s, b) - via);
          den += std::norm(direct.at(s, b));
          ++points;
        }
      }
    }
    const double rel = std::sqrt(num / den);
    return Outcome{rel <= 0.02, "relative L2 = " + fmt(rel) + " over " + std::to_string(points) + " (x, xi) points"};
  });

  const auto lat128 = square(-8.0, 0.125, 128);
  const auto gauss128 = SampledField::from_function(lat128, [](const std::vector<double>& t) { return Complex{gauss(t), 0.0}; });
  const auto bank_g = WindowBank::self_dual({Window::gaussian(1.0)});

  criterion(3, "round-trip inversion", 120.0, [&] {
    std::ostringstream table;
    table << "table dx:rel_err";
    std::vector<double> errs;
    for (double dx : {1.0, 0.5, 0.25}) {
      const auto c = dstft_forward(gauss128, frame_e1, bank_g, line(-6.0, 6.0, dx));
      errs.push_back(relative_l2_error(invert(c, bank_g, lat128), gauss128));
      table << ' ' << dx << ':' << fmt(errs.back());
    }
    const bool mono = errs[1] < errs[0] && errs[2] < errs[1];
    std::string note;
    if (!mono) {
      const auto wide = dstft_forward(gauss128, frame_e1, bank_g, line(-10.0, 10.0, 0.25));
      note = "; shifts over [-10,10] at dx 0.25 give " + fmt(relative_l2_error(invert(wide, bank_g, lat128), gauss128));
    }
    return Outcome{errs.back() <= 1e-3 && mono, table.str() + (mono ? "; decreasing" : "; not decreasing") + note};
  });

  criterion(4, "Parseval", 120.0, [&] {
    const auto shifts = line(-6.0, 6.0, 0.25);
    const auto same = parseval_check(gauss128, gauss128, bank_g, frame_e1, shifts);
    const auto odd = SampledField::from_function(lat128, [](const std::vector<double>& t) { return Complex{t[0] * gauss(t), 0.0}; });
    const auto orth = parseval_check(odd, gauss128, bank_g, frame_e1, shifts);
    const double orth_rel = std::abs(orth.lhs) / orth.scale;
    const bool ok = !same.rhs_degenerate && same.rel_err <= 1e-3 && orth_rel <= 1e-6;
    return Outcome{ok, "rel_err = " + fmt(same.rel_err) + "; orthogonal |lhs|/scale = " + fmt(orth_rel)};
  });

  criterion(5, "window-change identity", 120.0, [&] {
    ConvergenceSetup setup;
    setup.signal = [](std::span<const double> t) { return Complex{gauss(t), 0.0}; };
    setup.box_lower = {-8.0};
    setup.box_upper = {8.0};
    setup.shift_extent = 6.0;
    setup.interior_radius = 4.0;
    setup.levels = {{1.0 / 8.0, 0.5}, {1.0 / 16.0, 0.25}, {1.0 / 32.0, 0.125}};
    const WindowBank bank({Window::gaussian(1.0)}, {Window::gaussian(1.0)});
    const auto rows = window_change_convergence(setup, canonical_frame(1, 1), bank, std::vector<Window>{Window::hann(1.0)});
    std::ostringstream table;
    bool orders = true;
    table << "table step:rel_err:order";
    for (const auto& r : rows) {
      table << ' ' << r.signal_step << ':' << fmt(r.rel_err) << ':' << fmt(r.order);
      if (!std::isnan(r.order)) orders = orders && r.order >= 1.0;
    }
    return Outcome{rows.back().rel_err <= 1e-2 && orders, table.str()};
  });

  // Criteria 6 and 7 share one robustness run on the jump corpus.
  const auto params = corpus_params();
  const auto centers = centers_of(kCenters);
  const std::vector<WindowBank> banks{WindowBank::self_dual({Window::bump(1.0)}), WindowBank::self_dual({Window::bump(0.5)}),
                                      WindowBank::self_dual({Window::hann(0.75)})};
  RobustnessTable robust;
  double jump_front_n = std::numeric_limits<double>::infinity();
  std::string robust_error;

  criterion(6, "wave-front detection", 300.0, [&] {
    const auto f = jump_corpus();
    robust = window_robustness(f, frame_e1, banks, centers, {}, params);
    const auto& map = robust.entries[0].map;
    std::size_t mismatches = 0, singular = 0;
    double worst_gap = 0.0;
    std::ostringstream front;
    for (const auto& cell : map.cells) {
      const bool expect = skeleton(cell.center[0], cell.direction, params.radius, 1.0, params.half_angle);
      const auto v = cell.report.verdict;
      if (expect ? v != Verdict::singular : !is_regular(v)) ++mismatches;
      if (expect && v == Verdict::singular) {
        ++singular;
        const double want = heaviside_oracle(cell.center[0], cell.direction, 1.0, params);
        worst_gap = std::max(worst_gap, std::abs(cell.report.n_hat - want));
        if (cell.center[0] == 0.0) jump_front_n = std::min(jump_front_n, cell.report.n_hat);
        front << ' ' << fmt(cell.report.n_hat) << '/' << fmt(want);
      }
    }
    const auto gmap = wavefront_map(
        SampledField::from_function(square(-8.0, kCorpusDelta, kCorpusN),
                                    [](const std::vector<double>& t) { return Complex{gauss(t), 0.0}; }),
        frame_e1, banks[0], centers, {}, params);
    std::size_t gauss_bad = 0;
    for (const auto& cell : gmap.cells) gauss_bad += !is_regular(cell.report.verdict);
    const bool ok = mismatches == 0 && worst_gap <= 0.3 && gauss_bad == 0 && singular > 0;
    return Outcome{ok, std::to_string(map.cells.size()) + " cells, " + std::to_string(mismatches) +
                           " skeleton mismatches; front N_hat/oracle" + front.str() + " (max gap " + fmt(worst_gap) +
                           "); gaussian corpus non-regular cells " + std::to_string(gauss_bad)};
  });

  criterion(7, "window robustness", 300.0, [&] {
    if (robust.entries.size() != banks.size()) return Outcome{false, "no robustness run (criterion 6 failed early)"};
    std::string names;
    for (const auto& e : robust.entries) names += (names.empty() ? "" : ", ") + e.bank;
    return Outcome{robust.agree, "banks {" + names + "}: " + std::to_string(robust.disagreements) + " disagreeing cells"};
  });

  criterion(8, "localization", 120.0, [&] {
    const auto lat = square(-8.0, 1.0 / 32.0, 512);
    const auto f = SampledField::from_function(lat, [](const std::vector<double>& t) { return Complex{sgn(t[0]) * gauss(t), 0.0}; });
    const double a = 1.0, r = 0.5, x0 = 0.5;
    auto mutated = f;
    for (std::size_t j = 0; j < lat.size(); ++j) {
      const auto t = lat.point_at(j);
      if (std::abs(t[0] - x0) > a + r) mutated.values[j] = Complex{std::cos(7.0 * t[1]), t[0]};
    }
    const auto bank = WindowBank::self_dual({Window::bump(a)});
    const auto shifts = line(-3.0, 3.0, 0.25);
    const Execution exec{1, true};
    const auto c = dstft_forward(f, frame_e1, bank, shifts, exec);
    const auto cm = dstft_forward(mutated, frame_e1, bank, shifts, exec);
    std::size_t inside = 0, changed_inside = 0, changed_outside = 0;
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      const auto lhs = c.slice(s), rhs = cm.slice(s);
      const bool same = std::equal(lhs.begin(), lhs.end(), rhs.begin());
      if (std::abs(shifts.coordinate(0, s) - x0) <= r) {
        ++inside;
        changed_inside += !same;
      } else {
        changed_outside += !same;
      }
    }
    return Outcome{inside > 0 && changed_inside == 0,
                   std::to_string(inside) + " ball shifts bitwise identical: " + (changed_inside == 0 ? "yes" : "no") +
                       "; shifts changed outside the ball: " + std::to_string(changed_outside)};
  });

  criterion(9, "ridge spike decays slower than the jump", 300.0, [&] {
    const auto spike = render(SignalRecipe::ridge_spike({1.0, 0.0}, 0.0, 0.0, 1.0), square(-8.0, kCorpusDelta, kCorpusN));
    const auto map = wavefront_map(spike, frame_e1, banks[0], {{0.0}}, {}, params);
    double spike_n = -std::numeric_limits<double>::infinity();
    for (const auto& cell : map.cells) {
      if (skeleton(0.0, cell.direction, params.radius, 1.0, params.half_angle)) spike_n = std::max(spike_n, cell.report.n_hat);
    }
    return Outcome{spike_n < jump_front_n, "ridge_spike N_hat " + fmt(spike_n) + " < jump_ridge N_hat " + fmt(jump_front_n)};
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
