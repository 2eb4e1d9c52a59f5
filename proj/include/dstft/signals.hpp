#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dstft/lattice.hpp"

namespace dstft {

/// Test signal with known singular structure. All envelopes are peak
/// normalized Gaussians G(t) = exp(-|t - center|^2 / (2 sigma^2)).
struct SignalRecipe {
  enum class Kind { gaussian, jump_ridge, plane_wave, ridge_spike, sum };

  struct Term;

  Kind kind = Kind::gaussian;
  std::vector<double> center;     // envelope center; empty means the origin
  double sigma = 1.0;             // envelope width
  std::vector<double> direction;  // u for ridges (normalized on construction)
  double offset = 0.0;            // c in u.t = c
  double width = 0.0;             // ridge_spike width; 0 means the smallest lattice step
  std::vector<double> frequency;  // xi0 for plane_wave
  std::vector<Term> terms;        // for sum

  static SignalRecipe gaussian(std::vector<double> center, double sigma);
  /// sign(u.t - c) G(t), with sign(0) = 0.
  static SignalRecipe jump_ridge(std::vector<double> u, double c, double sigma);
  /// exp(2 pi i xi0.t) G(t).
  static SignalRecipe plane_wave(std::vector<double> xi0, double sigma);
  /// exp(-(u.t - c)^2 / (2 w^2)) / (w sqrt(2 pi)) G(t).
  static SignalRecipe ridge_spike(std::vector<double> u, double c, double width, double sigma);
  static SignalRecipe sum(std::vector<Term> terms);

  /// Value at t; `default_width` replaces a zero ridge_spike width.
  Complex evaluate(std::span<const double> t, double default_width) const;
};

struct SignalRecipe::Term {
  double weight = 1.0;
  SignalRecipe recipe;
};

std::string to_string(SignalRecipe::Kind kind);

/// Pointwise evaluation on the lattice.
SampledField render(const SignalRecipe& recipe, const Lattice& lattice);

/// "SIG v1" serialization. Parsing throws Errc::unknown_kind for kinds
/// outside the catalogue and Errc::parse for malformed entries.
nlohmann::json recipe_to_json(const SignalRecipe& recipe);
SignalRecipe recipe_from_json(const nlohmann::json& j);

/// A declared singular hyperplane {t : normal.t = offset} with normals +-normal.
struct SingularFront {
  std::vector<double> normal;
  double offset = 0.0;
  std::string source;
};

/// The declarative singular set: gaussian and plane_wave contribute nothing,
/// jump_ridge and ridge_spike their hyperplane, sum the union of its terms.
std::vector<SingularFront> ground_truth(const SignalRecipe& recipe);

/// Expected verdict for one cell: true when some front passes within
/// r + a of the cell's slab and `axis` lies within `half_angle` of +-normal.
///
/// The ball is the cube |u_i.t - x_i| <= r + a over the frame directions
/// `frame_directions`; a front whose normal lies outside their span always
/// meets it.
bool expected_singular(std::span<const SingularFront> fronts,
                       const std::vector<std::vector<double>>& frame_directions,
                       std::span<const double> center, std::span<const double> axis, double r,
                       double window_radius, double half_angle);

}  // namespace dstft
