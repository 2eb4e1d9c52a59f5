#include "dstft/windows.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dstft/directions.hpp"
#include "dstft/error.hpp"
#include "dstft/io.hpp"

namespace dstft {

namespace {

double parse_number(std::string_view token, std::string_view whole) {
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error(Errc::parse, "bad number '" + std::string(token) + "' in window spec '" +
                                 std::string(whole) + "'");
  }
  return value;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Window Window::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(Errc::invalid_argument, "gaussian sigma must be positive");
  Window w;
  w.kind_ = Kind::gaussian;
  w.parameter_ = sigma;
  return w;
}

Window Window::hann(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(Errc::invalid_argument, "hann radius must be positive");
  Window w;
  w.kind_ = Kind::hann;
  w.parameter_ = radius;
  return w;
}

Window Window::bump(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(Errc::invalid_argument, "bump radius must be positive");
  Window w;
  w.kind_ = Kind::bump;
  w.parameter_ = radius;
  return w;
}

Window Window::custom(SampledField samples, std::string source) {
  if (samples.lattice.dim() != 1) throw Error(Errc::invalid_argument, "custom window must be a 1-D field");
  Window w;
  w.kind_ = Kind::custom;
  w.parameter_ = 0.0;
  w.samples_ = std::make_shared<const SampledField>(std::move(samples));
  w.source_ = std::move(source);
  return w;
}

Window Window::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw Error(Errc::parse, "window spec '" + std::string(spec) + "' lacks ':'");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view rest = spec.substr(colon + 1);
  if (kind == "custom") {
    if (rest.empty()) throw Error(Errc::parse, "custom window needs a path in '" + std::string(spec) + "'");
    return custom(read_field(std::string(rest)), std::string(rest));
  }
  const auto eq = rest.find('=');
  if (eq == std::string_view::npos) {
    throw Error(Errc::parse, "window parameter '" + std::string(rest) + "' lacks '='");
  }
  const std::string_view key = rest.substr(0, eq);
  const double value = parse_number(rest.substr(eq + 1), spec);
  if (kind == "gaussian") {
    if (key != "sigma" && key != "σ" && key != "s") {
      throw Error(Errc::parse, "unknown gaussian parameter '" + std::string(key) + "'");
    }
    return gaussian(value);
  }
  if (kind == "hann" || kind == "bump") {
    if (key != "a") throw Error(Errc::parse, "unknown " + std::string(kind) + " parameter '" + std::string(key) + "'");
    return kind == "hann" ? hann(value) : bump(value);
  }
  throw Error(Errc::parse, "unknown window kind '" + std::string(kind) + "'");
}

Complex Window::operator()(double s) const noexcept {
  switch (kind_) {
    case Kind::gaussian: {
      const double z = s / parameter_;
      return {std::exp(-0.5 * z * z), 0.0};
    }
    case Kind::hann: {
      if (!(std::abs(s) < parameter_)) return {0.0, 0.0};
      const double c = std::cos(std::numbers::pi * s / (2.0 * parameter_));
      return {c * c, 0.0};
    }
    case Kind::bump: {
      if (!(std::abs(s) < parameter_)) return {0.0, 0.0};
      const double a2 = parameter_ * parameter_;
      return {std::exp(1.0 - a2 / (a2 - s * s)), 0.0};
    }
    case Kind::custom: {
      const auto& lat = samples_->lattice;
      const double pos = (s - lat.origin()[0]) / lat.step()[0];
      const double last = static_cast<double>(lat.count()[0] - 1);
      if (!(pos >= 0.0) || !(pos <= last)) return {0.0, 0.0};
      const auto j = static_cast<std::size_t>(std::floor(pos));
      if (j + 1 >= lat.count()[0]) return samples_->values[lat.count()[0] - 1];
      const double frac = pos - static_cast<double>(j);
      return (1.0 - frac) * samples_->values[j] + frac * samples_->values[j + 1];
    }
  }
  return {0.0, 0.0};
}

double Window::support_radius() const noexcept {
  switch (kind_) {
    case Kind::gaussian: return std::numeric_limits<double>::infinity();
    case Kind::hann:
    case Kind::bump: return parameter_;
    case Kind::custom: {
      const auto& lat = samples_->lattice;
      return std::max(std::abs(lat.lower(0)), std::abs(lat.upper(0)));
    }
  }
  return 0.0;
}

double Window::quadrature_radius() const noexcept {
  return kind_ == Kind::gaussian ? 8.0 * parameter_ : support_radius();
}

bool Window::real_valued() const noexcept {
  if (kind_ != Kind::custom) return true;
  for (const auto& v : samples_->values) {
    if (v.imag() != 0.0) return false;
  }
  return true;
}

std::string Window::grammar() const {
  switch (kind_) {
    case Kind::gaussian: return "gaussian:sigma=" + format_number(parameter_);
    case Kind::hann: return "hann:a=" + format_number(parameter_);
    case Kind::bump: return "bump:a=" + format_number(parameter_);
    case Kind::custom: return "custom:" + source_;
  }
  return {};
}

WindowBank::WindowBank(std::vector<Window> a, std::vector<Window> s)
    : analysis(std::move(a)), synthesis(std::move(s)) {
  if (analysis.empty()) throw Error(Errc::invalid_argument, "window bank needs at least one window");
  if (analysis.size() != synthesis.size()) {
    throw Error(Errc::invalid_argument, "analysis and synthesis window counts differ");
  }
}

WindowBank WindowBank::self_dual(std::vector<Window> windows) {
  auto copy = windows;
  return WindowBank(std::move(windows), std::move(copy));
}

Lattice pairing_lattice(const WindowBank& bank, double step) {
  double radius = 0.0;
  for (std::size_t i = 0; i < bank.k(); ++i) {
    radius = std::max(radius, std::min(bank.analysis[i].quadrature_radius(),
                                       bank.synthesis[i].quadrature_radius()));
  }
  const auto half = static_cast<std::size_t>(std::ceil(radius / step)) + 1;
  return Lattice::make({-static_cast<double>(half) * step}, {step}, {2 * half + 1});
}

Complex window_inner_product(const Window& a, const Window& b, const Lattice& quad_lattice) {
  if (quad_lattice.dim() != 1) throw Error(Errc::dimension_mismatch, "pairing lattice must be 1-D");
  Complex acc{};
  for (std::size_t j = 0; j < quad_lattice.count()[0]; ++j) {
    const double s = quad_lattice.coordinate(0, j);
    acc += a(s) * std::conj(b(s));
  }
  return acc * quad_lattice.step()[0];
}

Complex pairing(const WindowBank& bank, const Lattice& quad_lattice, double floor) {
  Complex p{1.0, 0.0};
  for (std::size_t i = 0; i < bank.k(); ++i) {
    p *= window_inner_product(bank.analysis[i], bank.synthesis[i], quad_lattice);
  }
  if (!(std::abs(p) > floor)) {
    throw Error(Errc::pairing_degenerate, "window pairing magnitude " + format_number(std::abs(p)) +
                                              " is below the floor " + format_number(floor));
  }
  return p;
}

Complex pairing(const WindowBank& bank, double floor) {
  return pairing(bank, pairing_lattice(bank), floor);
}

Complex eval_ridge_atom(std::span<const Window> windows, const DirectionFrame& frame,
                        std::span<const double> shift, std::span<const double> xi,
                        std::span<const double> t) {
  if (windows.size() != frame.k() || shift.size() != frame.k()) {
    throw Error(Errc::dimension_mismatch, "ridge atom needs one window and one shift per direction");
  }
  if (xi.size() != frame.n() || t.size() != frame.n()) {
    throw Error(Errc::dimension_mismatch, "ridge atom frequency/point dimension mismatch");
  }
  Complex value{1.0, 0.0};
  for (std::size_t i = 0; i < frame.k(); ++i) {
    value *= windows[i](frame.project(i, t) - shift[i]);
  }
  double phase = 0.0;
  for (std::size_t a = 0; a < frame.n(); ++a) phase += t[a] * xi[a];
  return value * std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

}  // namespace dstft
