#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dstft/lattice.hpp"

namespace dstft {

/// k linearly independent unit directions in R^n and the change of variables
/// s = B t that maps them onto the first k coordinate axes.
///
/// Rows 1..k of B are u_1..u_k. Rows k+1..n are e_{k+1}..e_n when that
/// matrix is invertible (the default completion), otherwise an orthonormal
/// basis of the orthogonal complement of span(u^k). C = B^{-1}.
class DirectionFrame {
 public:
  enum class Completion { identity, orthonormal };

  DirectionFrame() = default;

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return u_.size(); }
  const std::vector<std::vector<double>>& directions() const noexcept { return u_; }
  const std::vector<double>& direction(std::size_t i) const noexcept { return u_[i]; }
  const Eigen::MatrixXd& B() const noexcept { return b_; }
  const Eigen::MatrixXd& C() const noexcept { return c_; }
  double detC() const noexcept { return det_c_; }
  Completion completion() const noexcept { return completion_; }
  /// True when u_i = e_i for every i.
  bool canonical() const noexcept;

  /// u_i . t, accumulated in axis order.
  double project(std::size_t i, std::span<const double> t) const noexcept {
    double acc = 0.0;
    for (std::size_t a = 0; a < n_; ++a) acc += u_[i][a] * t[a];
    return acc;
  }

  friend DirectionFrame build_frame(std::vector<std::vector<double>> u, std::size_t n);

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<double>> u_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd c_;
  double det_c_ = 1.0;
  Completion completion_ = Completion::identity;
};

/// Normalizes the vectors and builds B, C = B^{-1} and det C.
/// Throws Errc::dependent_directions when rank(A) < k (smallest singular
/// value <= 1e-10), Errc::invalid_argument on zero vectors, k > n or size
/// mismatches. A singular identity completion falls back to the orthonormal
/// completion instead of failing.
DirectionFrame build_frame(std::vector<std::vector<double>> u, std::size_t n);

/// The canonical frame e^k = (e_1, ..., e_k) in R^n.
DirectionFrame canonical_frame(std::size_t k, std::size_t n);

/// Parses "0.7071,0.7071;1,0" into vectors (not yet normalized).
std::vector<std::vector<double>> parse_directions(std::string_view text);

/// eta = C^T xi.
std::vector<double> pullback_frequency(const DirectionFrame& frame, std::span<const double> xi);

/// Samples |det C| f(C s) on `target` by multilinear interpolation, zero
/// outside the box of `field`.
SampledField pushforward(const SampledField& field, const DirectionFrame& frame,
                         const Lattice& target);

/// Lattice with the given steps covering B applied to the box of `source`.
Lattice covering_lattice(const Lattice& source, const DirectionFrame& frame,
                         std::span<const double> step);

std::string to_string(DirectionFrame::Completion completion);

}  // namespace dstft
