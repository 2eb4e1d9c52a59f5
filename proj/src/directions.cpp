#include "dstft/directions.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "dstft/error.hpp"

namespace dstft {

namespace {

constexpr double kRankTolerance = 1e-10;

double smallest_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().minCoeff();
}

}  // namespace

bool DirectionFrame::canonical() const noexcept {
  for (std::size_t i = 0; i < k(); ++i) {
    for (std::size_t a = 0; a < n_; ++a) {
      if (u_[i][a] != (a == i ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

DirectionFrame build_frame(std::vector<std::vector<double>> u, std::size_t n) {
  const std::size_t k = u.size();
  if (n == 0 || k == 0 || k > n) {
    throw Error(Errc::invalid_argument, "need 1 <= k <= n directions (k=" + std::to_string(k) +
                                            ", n=" + std::to_string(n) + ")");
  }
  Eigen::MatrixXd a(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    if (u[i].size() != n) {
      throw Error(Errc::invalid_argument, "direction " + std::to_string(i) + " has " +
                                              std::to_string(u[i].size()) + " components, expected " +
                                              std::to_string(n));
    }
    double norm = 0.0;
    for (double c : u[i]) {
      if (!std::isfinite(c)) throw Error(Errc::invalid_argument, "non-finite direction component");
      norm += c * c;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) throw Error(Errc::invalid_argument, "direction " + std::to_string(i) + " is zero");
    for (auto& c : u[i]) c /= norm;
    for (std::size_t j = 0; j < n; ++j) a(i, j) = u[i][j];
  }
  if (smallest_singular_value(a) <= kRankTolerance) {
    throw Error(Errc::dependent_directions, "directions are linearly dependent");
  }

  DirectionFrame frame;
  frame.n_ = n;
  frame.u_ = std::move(u);
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
  b.topRows(k) = a;
  frame.completion_ = DirectionFrame::Completion::identity;
  if (smallest_singular_value(b) <= kRankTolerance) {
    // Rows k..n-1 become an orthonormal basis of span(u)^perp: the trailing
    // right singular vectors of A.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::MatrixXd& v = svd.matrixV();
    for (std::size_t r = k; r < n; ++r) b.row(static_cast<Eigen::Index>(r)) = v.col(static_cast<Eigen::Index>(r)).transpose();
    frame.completion_ = DirectionFrame::Completion::orthonormal;
    if (smallest_singular_value(b) <= kRankTolerance) {
      throw Error(Errc::singular_b, "no invertible completion of the direction matrix");
    }
  }
  frame.b_ = b;
  frame.c_ = b.inverse();
  frame.det_c_ = 1.0 / b.determinant();
  return frame;
}

DirectionFrame canonical_frame(std::size_t k, std::size_t n) {
  std::vector<std::vector<double>> u(k, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < k && i < n; ++i) u[i][i] = 1.0;
  return build_frame(std::move(u), n);
}

std::vector<std::vector<double>> parse_directions(std::string_view text) {
  std::vector<std::vector<double>> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(';', start), text.size());
    std::string_view vec = text.substr(start, end - start);
    std::vector<double> components;
    std::size_t cs = 0;
    while (cs <= vec.size()) {
      const auto ce = std::min(vec.find(',', cs), vec.size());
      std::string_view tok = vec.substr(cs, ce - cs);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw Error(Errc::parse, "bad direction component '" + std::string(tok) + "' in '" +
                                     std::string(text) + "'");
      }
      components.push_back(value);
      cs = ce + 1;
    }
    if (!out.empty() && components.size() != out.front().size()) {
      throw Error(Errc::parse, "vectors in '" + std::string(text) + "' differ in length");
    }
    out.push_back(std::move(components));
    start = end + 1;
  }
  return out;
}

std::vector<double> pullback_frequency(const DirectionFrame& frame, std::span<const double> xi) {
  if (xi.size() != frame.n()) throw Error(Errc::dimension_mismatch, "frequency dimension mismatch");
  std::vector<double> eta(frame.n(), 0.0);
  const auto& c = frame.C();
  for (std::size_t i = 0; i < frame.n(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < frame.n(); ++j) {
      acc += c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) * xi[j];
    }
    eta[i] = acc;
  }
  return eta;
}

SampledField pushforward(const SampledField& field, const DirectionFrame& frame,
                         const Lattice& target) {
  const std::size_t n = frame.n();
  if (field.lattice.dim() != n || target.dim() != n) {
    throw Error(Errc::dimension_mismatch, "pushforward lattices must match the frame dimension");
  }
  const auto& src = field.lattice;
  const auto& c = frame.C();
  const double jac = std::abs(frame.detC());
  SampledField out(target, field.label.empty() ? std::string{} : field.label + " (pushforward)");
  std::vector<double> t(n), pos(n);
  std::vector<std::size_t> base(n);
  const std::size_t corners = std::size_t{1} << n;
  for (std::size_t flat = 0; flat < target.size(); ++flat) {
    const auto s = target.point_at(flat);
    bool inside = true;
    for (std::size_t a = 0; a < n && inside; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        acc += c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * s[b];
      }
      t[a] = acc;
      pos[a] = (acc - src.origin()[a]) / src.step()[a];
      const double last = static_cast<double>(src.count()[a] - 1);
      if (!(pos[a] >= 0.0) || !(pos[a] <= last)) inside = false;
    }
    if (!inside) continue;
    for (std::size_t a = 0; a < n; ++a) {
      auto j = static_cast<std::size_t>(std::floor(pos[a]));
      if (j + 1 >= src.count()[a]) j = src.count()[a] - 2;
      base[a] = j;
      pos[a] -= static_cast<double>(j);
    }
    Complex acc{};
    std::vector<std::size_t> idx(n);
    for (std::size_t corner = 0; corner < corners; ++corner) {
      double weight = 1.0;
      for (std::size_t a = 0; a < n; ++a) {
        const bool hi = (corner >> a) & 1u;
        idx[a] = base[a] + (hi ? 1 : 0);
        weight *= hi ? pos[a] : 1.0 - pos[a];
      }
      if (weight != 0.0) acc += weight * field.values[src.flat_index(idx)];
    }
    out.values[flat] = jac * acc;
  }
  return out;
}

Lattice covering_lattice(const Lattice& source, const DirectionFrame& frame,
                         std::span<const double> step) {
  const std::size_t n = frame.n();
  if (source.dim() != n || step.size() != n) {
    throw Error(Errc::dimension_mismatch, "covering lattice dimension mismatch");
  }
  std::vector<double> lo(n, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
  const std::size_t corners = std::size_t{1} << n;
  for (std::size_t corner = 0; corner < corners; ++corner) {
    std::vector<double> t(n);
    for (std::size_t a = 0; a < n; ++a) t[a] = (corner >> a) & 1u ? source.upper(a) : source.lower(a);
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        s += frame.B()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) * t[a];
      }
      lo[r] = std::min(lo[r], s);
      hi[r] = std::max(hi[r], s);
    }
  }
  std::vector<double> origin(n);
  std::vector<std::size_t> count(n);
  for (std::size_t a = 0; a < n; ++a) {
    origin[a] = std::floor(lo[a] / step[a]) * step[a];
    count[a] = static_cast<std::size_t>(std::ceil((hi[a] - origin[a]) / step[a])) + 1;
    count[a] = std::max<std::size_t>(count[a], 2);
  }
  return Lattice::make(std::move(origin), {step.begin(), step.end()}, std::move(count));
}

std::string to_string(DirectionFrame::Completion completion) {
  return completion == DirectionFrame::Completion::identity ? "identity" : "orthonormal";
}

}  // namespace dstft
