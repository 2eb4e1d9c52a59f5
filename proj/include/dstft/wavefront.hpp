#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dstft/transform.hpp"

namespace dstft {

/// Ball L_r(x0) times cone Gamma around `axis`, scanned over J geometric shells.
struct ConeQuery {
  std::vector<double> center;  // x0, k entries
  double radius = 0.5;         // r; the ball is the closed cube |x_a - x0_a| <= r on the shift lattice
  std::vector<double> axis;    // unit vector in R^n
  double half_angle = 0.5235987755982988;  // pi/6
  double r_min = 0.0;          // 0 picks 2 * largest frequency step
  double r_max = 0.0;          // 0 picks Nyquist/2
  std::size_t shells = 8;
  bool two_sided = false;      // cone around +axis and -axis
};

enum class Verdict { regular, singular, below_floor, inconclusive };
std::string to_string(Verdict v);
inline bool is_regular(Verdict v) { return v == Verdict::regular || v == Verdict::below_floor; }

struct ShellScan {
  std::vector<double> radii;      // lower shell edges, strictly increasing
  std::vector<double> sup;        // max |coefficient| per shell
  std::vector<std::size_t> bins;  // frequency bins per shell inside the cone
  std::size_t ball_shifts = 0;
};

struct DecayFit {
  double slope = 0.0;      // -N_hat
  double intercept = 0.0;  // log C
  double r2 = 0.0;
  std::size_t used = 0;    // shells above the floor
};

struct Thresholds {
  double n_threshold = 8.0;
  double floor = 1e-12;
  double min_r2 = 0.9;
  std::size_t min_shells = 4;
  std::size_t min_bins = 8;
};

struct DecayReport {
  ConeQuery query;
  ShellScan scan;
  DecayFit fit;
  double n_hat = 0.0;  // +inf for below_floor
  Verdict verdict = Verdict::inconclusive;
  std::string note;
};

/// Resolves r_min/r_max defaults and checks 0 < theta < pi/2, J >= 4,
/// r_min >= 2 * max frequency step, r_max <= Nyquist/2 and a nonempty ball.
ConeQuery resolve_query(const CoefficientField& coeffs, ConeQuery query);

/// Per-shell suprema of |coeffs| over the ball and the cone. Shells with no
/// bins report sup 0 and bins 0.
ShellScan cone_supremum(const CoefficientField& coeffs, const ConeQuery& query);

/// Least squares of log sup against log sqrt(1 + r^2) over shells above `floor`.
DecayFit fit_decay(std::span<const double> radii, std::span<const double> sup, double floor = 1e-12);

/// Regular if N_hat >= threshold or every shell is below the floor
/// (below_floor); singular if N_hat < threshold with R^2 >= min_r2;
/// inconclusive when fewer than min_shells shells clear the floor, a
/// nonempty shell holds fewer than min_bins bins, or the fit is poor.
Verdict classify(const ShellScan& scan, const DecayFit& fit, const Thresholds& thresholds);

/// cone_supremum + fit_decay + classify for one query.
DecayReport analyze(const CoefficientField& coeffs, const ConeQuery& query, const Thresholds& thresholds);

struct WavefrontParams {
  double radius = 0.5;
  double half_angle = 0.5235987755982988;
  double r_min = 0.0;
  double r_max = 0.0;
  std::size_t shells = 8;
  Thresholds thresholds;
  double shift_step = 0.0;       // 0 picks 4 * smallest signal step
  bool allow_noncompact = false;
  bool two_sided = false;        // cones around +-axis; the signal overload sets it for real inputs
};

struct WavefrontCell {
  std::vector<double> center;
  std::vector<double> direction;
  DecayReport report;
};

struct WavefrontMap {
  std::vector<WavefrontCell> cells;
  WavefrontParams params;
  std::vector<std::string> windows;
  bool outside_hypothesis = false;  // non-compact windows were allowed
  bool two_sided = false;
};

/// Cone axes for an n-dimensional map with angular spacing <= `spacing`.
/// n = 2 uses the half circle at angles (j + 1/2) pi / M; n = 1 is {+1};
/// n = 3 uses a Fibonacci half sphere. Half sets rely on conjugate symmetry.
std::vector<std::vector<double>> default_directions(std::size_t n, double spacing);

/// Computes the coefficients once on a shift lattice covering the balls and
/// analyzes every (center, direction) cell. Throws Errc::invalid_argument for
/// non-compact or g(0) = 0 windows unless `allow_noncompact` is set.
WavefrontMap wavefront_map(const SampledField& f, const DirectionFrame& frame, const WindowBank& bank,
                           const std::vector<std::vector<double>>& centers,
                           const std::vector<std::vector<double>>& directions,
                           const WavefrontParams& params, const Execution& exec = {});

/// Same as above on precomputed coefficients.
WavefrontMap wavefront_map(const CoefficientField& coeffs, const std::vector<std::vector<double>>& centers,
                           const std::vector<std::vector<double>>& directions, const WavefrontParams& params,
                           const Execution& exec = {});

/// Shift lattice covering every ball of the given centers.
Lattice wavefront_shift_lattice(const std::vector<std::vector<double>>& centers, double radius, double step);

struct RobustnessEntry {
  std::string bank;
  WavefrontMap map;
};

struct RobustnessTable {
  std::vector<RobustnessEntry> entries;
  bool agree = true;
  std::size_t disagreements = 0;
};

/// Runs the map for each bank. banks[0] is the reference with (r, theta);
/// the others use r/2 and theta/2. Alternates must have support radii no
/// larger than the reference's. Verdicts agree when every cell is regular
/// for all banks or singular for all banks.
RobustnessTable window_robustness(const SampledField& f, const DirectionFrame& frame,
                                  const std::vector<WindowBank>& banks,
                                  const std::vector<std::vector<double>>& centers,
                                  const std::vector<std::vector<double>>& directions,
                                  const WavefrontParams& params, const Execution& exec = {});

std::string wavefront_csv(const WavefrontMap& map);
nlohmann::json wavefront_json(const WavefrontMap& map);

}  // namespace dstft
