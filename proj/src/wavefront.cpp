#include "dstft/wavefront.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "dstft/error.hpp"

namespace dstft {

using nlohmann::json;

namespace {

constexpr double kEdgeSlack = 1e-9;

struct ConeIndex {
  std::vector<std::size_t> bin;
  std::vector<std::size_t> shell;
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

ConeIndex build_index(const CoefficientField& coeffs, const ConeQuery& q) {
  ConeIndex index;
  const std::size_t J = q.shells;
  for (std::size_t j = 0; j <= J; ++j) {
    index.edges.push_back(q.r_min * std::pow(q.r_max / q.r_min, static_cast<double>(j) / static_cast<double>(J)));
  }
  index.edges.back() = q.r_max;
  index.counts.assign(J, 0);
  const double cos_theta = std::cos(q.half_angle);
  const auto& freq = coeffs.freq_lattice;
  const std::size_t n = freq.dim();
  MultiIndex idx(n, 0);
  for (std::size_t flat = 0; flat < freq.size(); ++flat) {
    double r2 = 0.0, along = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double xi = freq.frequency(a, idx[a]);
      r2 += xi * xi;
      along += xi * q.axis[a];
    }
    const double r = std::sqrt(r2);
    const double proj = q.two_sided ? std::abs(along) : along;
    if (r >= q.r_min && r < q.r_max && proj >= r * cos_theta) {
      auto it = std::upper_bound(index.edges.begin(), index.edges.end(), r);
      const auto j = static_cast<std::size_t>(it - index.edges.begin()) - 1;
      index.bin.push_back(flat);
      index.shell.push_back(j);
      ++index.counts[j];
    }
    for (std::size_t a = n; a-- > 0;) {
      if (++idx[a] < freq.count()[a]) break;
      idx[a] = 0;
    }
  }
  return index;
}

std::vector<std::size_t> ball_shifts(const Lattice& shifts, std::span<const double> center, double radius) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    const auto x = shifts.point_at(s);
    bool inside = true;
    for (std::size_t a = 0; a < x.size() && inside; ++a) inside = std::abs(x[a] - center[a]) <= radius + kEdgeSlack;
    if (inside) out.push_back(s);
  }
  return out;
}

ShellScan scan(const CoefficientField& coeffs, const ConeQuery& q, const ConeIndex& index) {
  ShellScan result;
  result.radii.assign(index.edges.begin(), index.edges.end() - 1);
  result.bins = index.counts;
  result.sup.assign(q.shells, 0.0);
  const auto shifts = ball_shifts(coeffs.shift_lattice, q.center, q.radius);
  result.ball_shifts = shifts.size();
  for (const auto s : shifts) {
    const auto row = coeffs.slice(s);
    for (std::size_t i = 0; i < index.bin.size(); ++i) {
      const double m = std::abs(row[index.bin[i]]);
      auto& sup = result.sup[index.shell[i]];
      if (m > sup) sup = m;
    }
  }
  return result;
}

std::vector<double> unit(std::vector<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw Error(Errc::invalid_argument, "cone axis must be nonzero");
  for (double& x : v) x /= norm;
  return v;
}

void require_admissible_windows(const std::vector<Window>& windows, bool allow_noncompact) {
  for (const auto& w : windows) {
    if (std::abs(w.center_value()) == 0.0) {
      throw Error(Errc::invalid_argument, "window " + w.grammar() + " vanishes at 0");
    }
    if (!w.compact() && !allow_noncompact) {
      throw Error(Errc::invalid_argument, "window " + w.grammar() +
                                              " is not compactly supported (pass allow_noncompact to override)");
    }
  }
}

bool all_compact(const WindowBank& bank) {
  return std::all_of(bank.analysis.begin(), bank.analysis.end(), [](const Window& w) { return w.compact(); });
}

std::vector<std::string> grammar_of(const WindowBank& bank) {
  std::vector<std::string> out;
  for (const auto& w : bank.analysis) out.push_back(w.grammar());
  return out;
}

// Default axes: spacing 0.75 theta, negated copies when conjugate symmetry is not available.
std::vector<std::vector<double>> map_directions(std::size_t n, double half_angle, bool two_sided) {
  auto dirs = default_directions(n, 0.75 * half_angle);
  if (!two_sided) {
    const auto half = dirs.size();
    for (std::size_t i = 0; i < half; ++i) {
      auto d = dirs[i];
      for (double& v : d) v = -v;
      dirs.push_back(std::move(d));
    }
  }
  return dirs;
}

bool real_input(const SampledField& f, const WindowBank& bank) {
  return std::all_of(f.values.begin(), f.values.end(), [](const Complex& v) { return v.imag() == 0.0; }) &&
         std::all_of(bank.analysis.begin(), bank.analysis.end(), [](const Window& w) { return w.real_valued(); });
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::regular: return "Regular";
    case Verdict::singular: return "Singular";
    case Verdict::below_floor: return "BelowFloor";
    case Verdict::inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

ConeQuery resolve_query(const CoefficientField& coeffs, ConeQuery q) {
  const auto& freq = coeffs.freq_lattice;
  const std::size_t n = freq.dim();
  if (q.axis.size() != n) throw Error(Errc::dimension_mismatch, "cone axis must have " + std::to_string(n) + " entries");
  if (q.center.size() != coeffs.frame.k()) {
    throw Error(Errc::dimension_mismatch, "ball center must have " + std::to_string(coeffs.frame.k()) + " entries");
  }
  q.axis = unit(std::move(q.axis));
  double max_step = 0.0, nyquist = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    max_step = std::max(max_step, freq.step(a));
    nyquist = std::min(nyquist, freq.nyquist(a));
  }
  if (q.r_min == 0.0) q.r_min = 2.0 * max_step;
  if (q.r_max == 0.0) q.r_max = nyquist / 2.0;
  if (!(q.half_angle > 0.0 && q.half_angle < std::numbers::pi / 2)) {
    throw Error(Errc::invalid_argument, "cone half angle must lie in (0, pi/2)");
  }
  if (q.shells < 4) throw Error(Errc::invalid_argument, "at least 4 shells are needed");
  if (q.r_min < 2.0 * max_step * (1.0 - 1e-12)) {
    throw Error(Errc::invalid_argument, "r_min must be at least twice the frequency step");
  }
  if (q.r_max > nyquist / 2.0 * (1.0 + 1e-12)) throw Error(Errc::invalid_argument, "r_max must not exceed Nyquist/2");
  if (!(q.r_max > q.r_min)) throw Error(Errc::invalid_argument, "r_max must exceed r_min");
  if (!(q.radius >= 0.0)) throw Error(Errc::invalid_argument, "ball radius must be >= 0");
  if (ball_shifts(coeffs.shift_lattice, q.center, q.radius).empty()) {
    throw Error(Errc::invalid_argument, "ball does not meet the shift lattice");
  }
  return q;
}

ShellScan cone_supremum(const CoefficientField& coeffs, const ConeQuery& query) {
  const auto q = resolve_query(coeffs, query);
  return scan(coeffs, q, build_index(coeffs, q));
}

DecayFit fit_decay(std::span<const double> radii, std::span<const double> sup, double floor) {
  if (radii.size() != sup.size()) throw Error(Errc::dimension_mismatch, "radii and suprema differ in length");
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (sup[j] > floor) {
      xs.push_back(0.5 * std::log1p(radii[j] * radii[j]));
      ys.push_back(std::log(sup[j]));
    }
  }
  DecayFit fit;
  fit.used = xs.size();
  if (xs.size() < 2) {
    fit.intercept = ys.empty() ? 0.0 : ys[0];
    return fit;
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

Verdict classify(const ShellScan& scan, const DecayFit& fit, const Thresholds& t) {
  bool any_bins = false, any_above = false, sparse = false;
  for (std::size_t j = 0; j < scan.sup.size(); ++j) {
    if (scan.bins[j] == 0) continue;
    any_bins = true;
    any_above = any_above || scan.sup[j] > t.floor;
    sparse = sparse || scan.bins[j] < t.min_bins;
  }
  if (!any_bins) return Verdict::inconclusive;
  if (!any_above) return Verdict::below_floor;
  if (sparse || fit.used < t.min_shells) return Verdict::inconclusive;
  const double n_hat = -fit.slope;
  if (n_hat >= t.n_threshold) return Verdict::regular;
  if (fit.r2 >= t.min_r2) return Verdict::singular;
  return Verdict::inconclusive;
}

namespace {

DecayReport analyze_with(const CoefficientField& coeffs, const ConeQuery& q, const ConeIndex& index,
                         const Thresholds& t) {
  DecayReport report;
  report.query = q;
  report.scan = scan(coeffs, q, index);
  report.fit = fit_decay(report.scan.radii, report.scan.sup, t.floor);
  report.verdict = classify(report.scan, report.fit, t);
  report.n_hat = report.verdict == Verdict::below_floor ? std::numeric_limits<double>::infinity() : -report.fit.slope;
  std::size_t empty = 0;
  for (auto b : report.scan.bins) empty += b == 0;
  if (empty > 0) report.note = std::to_string(empty) + " empty shell(s) skipped";
  return report;
}

}  // namespace

DecayReport analyze(const CoefficientField& coeffs, const ConeQuery& query, const Thresholds& thresholds) {
  const auto q = resolve_query(coeffs, query);
  return analyze_with(coeffs, q, build_index(coeffs, q), thresholds);
}

std::vector<std::vector<double>> default_directions(std::size_t n, double spacing) {
  if (!(spacing > 0.0)) throw Error(Errc::invalid_argument, "direction spacing must be positive");
  if (n == 1) return {{1.0}};
  if (n == 2) {
    const auto m = static_cast<std::size_t>(std::ceil(std::numbers::pi / spacing - 1e-12));
    std::vector<std::vector<double>> out;
    for (std::size_t j = 0; j < m; ++j) {
      const double phi = (static_cast<double>(j) + 0.5) * std::numbers::pi / static_cast<double>(m);
      out.push_back({std::cos(phi), std::sin(phi)});
    }
    return out;
  }
  if (n == 3) {
    // Half sphere (z >= 0) with cap area matched to the spacing.
    const double cap = 2.0 * std::numbers::pi * (1.0 - std::cos(spacing / 2.0));
    const auto m = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / cap)));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<std::vector<double>> out;
    for (std::size_t j = 0; j < m; ++j) {
      const double z = 1.0 - (static_cast<double>(j) + 0.5) / static_cast<double>(m);
      const double rho = std::sqrt(1.0 - z * z);
      const double phi = golden * static_cast<double>(j);
      out.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
    }
    return out;
  }
  throw Error(Errc::invalid_argument, "no default direction grid for n > 3; pass directions explicitly");
}

Lattice wavefront_shift_lattice(const std::vector<std::vector<double>>& centers, double radius, double step) {
  if (centers.empty()) throw Error(Errc::invalid_argument, "no ball centers");
  const std::size_t k = centers[0].size();
  std::vector<double> origin(k);
  std::vector<std::size_t> count(k);
  for (std::size_t a = 0; a < k; ++a) {
    double lo = centers[0][a], hi = lo;
    for (const auto& c : centers) {
      if (c.size() != k) throw Error(Errc::dimension_mismatch, "ball centers differ in dimension");
      lo = std::min(lo, c[a]);
      hi = std::max(hi, c[a]);
    }
    origin[a] = lo - radius;
    count[a] = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround((hi - lo + 2.0 * radius) / step)) + 1);
  }
  return Lattice::make(std::move(origin), std::vector<double>(k, step), std::move(count));
}

WavefrontMap wavefront_map(const CoefficientField& coeffs, const std::vector<std::vector<double>>& centers,
                           const std::vector<std::vector<double>>& directions, const WavefrontParams& params,
                           const Execution& exec) {
  require_admissible_windows(coeffs.bank.analysis, params.allow_noncompact);
  WavefrontMap map;
  map.params = params;
  map.windows = grammar_of(coeffs.bank);
  map.outside_hypothesis = !all_compact(coeffs.bank);
  map.two_sided = params.two_sided;

  const auto dirs = directions.empty() ? map_directions(coeffs.frame.n(), params.half_angle, params.two_sided)
                                       : directions;

  std::vector<ConeQuery> queries;
  std::vector<ConeIndex> indices(dirs.size());
  for (const auto& d : dirs) {
    ConeQuery q;
    q.center = centers.at(0);
    q.radius = params.radius;
    q.axis = d;
    q.half_angle = params.half_angle;
    q.r_min = params.r_min;
    q.r_max = params.r_max;
    q.shells = params.shells;
    q.two_sided = params.two_sided;
    queries.push_back(resolve_query(coeffs, q));
  }
  detail::parallel_blocks(dirs.size(), exec.threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i) indices[i] = build_index(coeffs, queries[i]);
  });

  map.cells.resize(centers.size() * dirs.size());
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      auto& cell = map.cells[c * dirs.size() + d];
      cell.center = centers[c];
      cell.direction = queries[d].axis;
    }
  }
  detail::parallel_blocks(map.cells.size(), exec.threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i) {
      auto q = queries[i % dirs.size()];
      q.center = map.cells[i].center;
      q = resolve_query(coeffs, q);
      map.cells[i].report = analyze_with(coeffs, q, indices[i % dirs.size()], params.thresholds);
    }
  });
  return map;
}

WavefrontMap wavefront_map(const SampledField& f, const DirectionFrame& frame, const WindowBank& bank,
                           const std::vector<std::vector<double>>& centers,
                           const std::vector<std::vector<double>>& directions, const WavefrontParams& params,
                           const Execution& exec) {
  require_admissible_windows(bank.analysis, params.allow_noncompact);
  const double smallest = *std::min_element(f.lattice.step().begin(), f.lattice.step().end());
  const double step = params.shift_step > 0.0 ? params.shift_step : 4.0 * smallest;
  const auto shifts = wavefront_shift_lattice(centers, params.radius, step);
  const auto coeffs = dstft_forward(f, frame, bank, shifts, exec);

  WavefrontParams p = params;
  p.two_sided = p.two_sided || real_input(f, bank);
  p.shift_step = step;
  return wavefront_map(coeffs, centers, directions, p, exec);
}

RobustnessTable window_robustness(const SampledField& f, const DirectionFrame& frame,
                                  const std::vector<WindowBank>& banks,
                                  const std::vector<std::vector<double>>& centers,
                                  const std::vector<std::vector<double>>& directions,
                                  const WavefrontParams& params, const Execution& exec) {
  if (banks.empty()) throw Error(Errc::invalid_argument, "no window banks");
  const auto& reference = banks[0];
  for (std::size_t b = 1; b < banks.size(); ++b) {
    if (banks[b].k() != reference.k()) throw Error(Errc::dimension_mismatch, "banks differ in window count");
    for (std::size_t i = 0; i < reference.k(); ++i) {
      if (banks[b].analysis[i].support_radius() > reference.analysis[i].support_radius()) {
        throw Error(Errc::invalid_argument, "alternate window " + banks[b].analysis[i].grammar() +
                                                " is wider than the reference " + reference.analysis[i].grammar());
      }
    }
  }
  // Every bank is scored on the reference's cells; only the ball and cone shrink.
  const bool two_sided = std::all_of(banks.begin(), banks.end(), [&](const WindowBank& b) { return real_input(f, b); });
  const auto axes = directions.empty() ? map_directions(frame.n(), params.half_angle, params.two_sided || two_sided)
                                       : directions;
  RobustnessTable table;
  for (std::size_t b = 0; b < banks.size(); ++b) {
    WavefrontParams p = params;
    if (b > 0) {
      p.radius = params.radius / 2.0;
      p.half_angle = params.half_angle / 2.0;
    }
    p.two_sided = params.two_sided || two_sided;
    auto map = wavefront_map(f, frame, banks[b], centers, axes, p, exec);
    std::string name;
    for (const auto& g : map.windows) name += (name.empty() ? "" : "|") + g;
    table.entries.push_back({name, std::move(map)});
  }
  const auto& ref_cells = table.entries[0].map.cells;
  for (std::size_t c = 0; c < ref_cells.size(); ++c) {
    bool all_regular = true, all_singular = true;
    for (const auto& entry : table.entries) {
      const auto v = entry.map.cells.at(c).report.verdict;
      all_regular = all_regular && is_regular(v);
      all_singular = all_singular && v == Verdict::singular;
    }
    if (!all_regular && !all_singular) ++table.disagreements;
  }
  table.agree = table.disagreements == 0;
  return table;
}

std::string wavefront_csv(const WavefrontMap& map) {
  std::ostringstream os;
  os << std::setprecision(10);
  if (!map.cells.empty()) {
    for (std::size_t a = 0; a < map.cells[0].center.size(); ++a) os << "x" << a << ',';
    for (std::size_t a = 0; a < map.cells[0].direction.size(); ++a) os << "d" << a << ',';
  }
  os << "n_hat,r2,verdict\n";
  for (const auto& cell : map.cells) {
    for (double v : cell.center) os << v << ',';
    for (double v : cell.direction) os << v << ',';
    if (std::isinf(cell.report.n_hat)) os << "inf";
    else os << cell.report.n_hat;
    os << ',' << cell.report.fit.r2 << ',' << to_string(cell.report.verdict) << '\n';
  }
  return os.str();
}

json wavefront_json(const WavefrontMap& map) {
  const auto& p = map.params;
  json cells = json::array();
  for (const auto& cell : map.cells) {
    const auto& r = cell.report;
    cells.push_back({{"center", cell.center},
                     {"direction", cell.direction},
                     {"shell_radii", r.scan.radii},
                     {"shell_sup", r.scan.sup},
                     {"shell_bins", r.scan.bins},
                     {"ball_shifts", r.scan.ball_shifts},
                     {"slope", r.fit.slope},
                     {"intercept", r.fit.intercept},
                     {"r2", r.fit.r2},
                     {"n_hat", std::isinf(r.n_hat) ? json(nullptr) : json(r.n_hat)},
                     {"verdict", to_string(r.verdict)},
                     {"note", r.note}});
  }
  return {{"windows", map.windows},
          {"outside_hypothesis", map.outside_hypothesis},
          {"two_sided", map.two_sided},
          {"params",
           {{"radius", p.radius},
            {"half_angle", p.half_angle},
            {"r_min", map.cells.empty() ? p.r_min : map.cells[0].report.query.r_min},
            {"r_max", map.cells.empty() ? p.r_max : map.cells[0].report.query.r_max},
            {"shells", p.shells},
            {"n_threshold", p.thresholds.n_threshold},
            {"floor", p.thresholds.floor},
            {"min_r2", p.thresholds.min_r2},
            {"shift_step", p.shift_step}}},
          {"cells", cells}};
}

}  // namespace dstft
