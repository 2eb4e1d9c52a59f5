#include "dstft/signals.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "dstft/error.hpp"

namespace dstft {

using nlohmann::json;

namespace {

std::vector<double> normalized(std::vector<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw Error(Errc::invalid_argument, "ridge direction must be nonzero");
  for (double& x : v) x /= norm;
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::dimension_mismatch, "vector dimensions disagree");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double envelope(const SignalRecipe& r, std::span<const double> t) {
  double d2 = 0.0;
  for (std::size_t a = 0; a < t.size(); ++a) {
    const double c = r.center.empty() ? 0.0 : r.center.at(a);
    d2 += (t[a] - c) * (t[a] - c);
  }
  return std::exp(-d2 / (2.0 * r.sigma * r.sigma));
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(Errc::invalid_argument, "envelope sigma must be positive");
}

}  // namespace

SignalRecipe SignalRecipe::gaussian(std::vector<double> center, double sigma) {
  check_sigma(sigma);
  SignalRecipe r;
  r.kind = Kind::gaussian;
  r.center = std::move(center);
  r.sigma = sigma;
  return r;
}

SignalRecipe SignalRecipe::jump_ridge(std::vector<double> u, double c, double sigma) {
  check_sigma(sigma);
  SignalRecipe r;
  r.kind = Kind::jump_ridge;
  r.direction = normalized(std::move(u));
  r.offset = c;
  r.sigma = sigma;
  return r;
}

SignalRecipe SignalRecipe::plane_wave(std::vector<double> xi0, double sigma) {
  check_sigma(sigma);
  SignalRecipe r;
  r.kind = Kind::plane_wave;
  r.frequency = std::move(xi0);
  r.sigma = sigma;
  return r;
}

SignalRecipe SignalRecipe::ridge_spike(std::vector<double> u, double c, double width, double sigma) {
  check_sigma(sigma);
  if (width < 0.0 || !std::isfinite(width)) throw Error(Errc::invalid_argument, "spike width must be >= 0");
  SignalRecipe r;
  r.kind = Kind::ridge_spike;
  r.direction = normalized(std::move(u));
  r.offset = c;
  r.width = width;
  r.sigma = sigma;
  return r;
}

SignalRecipe SignalRecipe::sum(std::vector<Term> terms) {
  SignalRecipe r;
  r.kind = Kind::sum;
  r.terms = std::move(terms);
  return r;
}

Complex SignalRecipe::evaluate(std::span<const double> t, double default_width) const {
  switch (kind) {
    case Kind::gaussian:
      return envelope(*this, t);
    case Kind::jump_ridge: {
      const double s = dot(direction, t) - offset;
      const double sign = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
      return sign * envelope(*this, t);
    }
    case Kind::plane_wave:
      return std::polar(envelope(*this, t), 2.0 * std::numbers::pi * dot(frequency, t));
    case Kind::ridge_spike: {
      const double w = width > 0.0 ? width : default_width;
      const double s = (dot(direction, t) - offset) / w;
      return std::exp(-0.5 * s * s) / (w * std::sqrt(2.0 * std::numbers::pi)) * envelope(*this, t);
    }
    case Kind::sum: {
      Complex acc{};
      for (const auto& term : terms) acc += term.weight * term.recipe.evaluate(t, default_width);
      return acc;
    }
  }
  return {};
}

std::string to_string(SignalRecipe::Kind kind) {
  switch (kind) {
    case SignalRecipe::Kind::gaussian: return "gaussian";
    case SignalRecipe::Kind::jump_ridge: return "jump_ridge";
    case SignalRecipe::Kind::plane_wave: return "plane_wave";
    case SignalRecipe::Kind::ridge_spike: return "ridge_spike";
    case SignalRecipe::Kind::sum: return "sum";
  }
  return "unknown";
}

SampledField render(const SignalRecipe& recipe, const Lattice& lattice) {
  const double smallest = *std::min_element(lattice.step().begin(), lattice.step().end());
  SampledField field(lattice, to_string(recipe.kind));
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    field.values[i] = recipe.evaluate(lattice.point_at(i), smallest);
  }
  return field;
}

json recipe_to_json(const SignalRecipe& r) {
  json j = {{"kind", to_string(r.kind)}};
  switch (r.kind) {
    case SignalRecipe::Kind::gaussian:
      j["center"] = r.center;
      j["sigma"] = r.sigma;
      break;
    case SignalRecipe::Kind::jump_ridge:
      j["u"] = r.direction;
      j["c"] = r.offset;
      j["sigma"] = r.sigma;
      j["center"] = r.center;
      break;
    case SignalRecipe::Kind::plane_wave:
      j["xi0"] = r.frequency;
      j["sigma"] = r.sigma;
      j["center"] = r.center;
      break;
    case SignalRecipe::Kind::ridge_spike:
      j["u"] = r.direction;
      j["c"] = r.offset;
      j["width"] = r.width;
      j["sigma"] = r.sigma;
      j["center"] = r.center;
      break;
    case SignalRecipe::Kind::sum: {
      json terms = json::array();
      for (const auto& t : r.terms) terms.push_back({{"weight", t.weight}, {"recipe", recipe_to_json(t.recipe)}});
      j["terms"] = terms;
      break;
    }
  }
  return j;
}

SignalRecipe recipe_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::parse, "recipe needs a 'kind'");
  if (j.contains("version") && j["version"] != "SIG v1") {
    throw Error(Errc::parse, "unsupported recipe version " + j["version"].dump());
  }
  const auto kind = j["kind"].get<std::string>();
  try {
    const auto center = j.value("center", std::vector<double>{});
    const double sigma = j.value("sigma", 1.0);
    SignalRecipe r;
    if (kind == "gaussian") {
      r = SignalRecipe::gaussian(center, sigma);
    } else if (kind == "jump_ridge") {
      r = SignalRecipe::jump_ridge(j.at("u").get<std::vector<double>>(), j.value("c", 0.0), sigma);
    } else if (kind == "plane_wave") {
      r = SignalRecipe::plane_wave(j.at("xi0").get<std::vector<double>>(), sigma);
    } else if (kind == "ridge_spike") {
      r = SignalRecipe::ridge_spike(j.at("u").get<std::vector<double>>(), j.value("c", 0.0), j.value("width", 0.0), sigma);
    } else if (kind == "sum") {
      std::vector<SignalRecipe::Term> terms;
      for (const auto& t : j.at("terms")) terms.push_back({t.value("weight", 1.0), recipe_from_json(t.at("recipe"))});
      return SignalRecipe::sum(std::move(terms));
    } else {
      throw Error(Errc::unknown_kind, "unknown signal kind '" + kind + "'");
    }
    r.center = center;
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::parse, "recipe '" + kind + "': " + e.what());
  }
}

std::vector<SingularFront> ground_truth(const SignalRecipe& recipe) {
  switch (recipe.kind) {
    case SignalRecipe::Kind::gaussian:
    case SignalRecipe::Kind::plane_wave:
      return {};
    case SignalRecipe::Kind::jump_ridge:
    case SignalRecipe::Kind::ridge_spike:
      return {{recipe.direction, recipe.offset, to_string(recipe.kind)}};
    case SignalRecipe::Kind::sum: {
      std::vector<SingularFront> out;
      for (const auto& t : recipe.terms) {
        if (t.weight == 0.0) continue;
        auto part = ground_truth(t.recipe);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
  }
  throw Error(Errc::unknown_kind, "no ground truth for this recipe");
}

bool expected_singular(std::span<const SingularFront> fronts, const std::vector<std::vector<double>>& frame_directions,
                       std::span<const double> center, std::span<const double> axis, double r,
                       double window_radius, double half_angle) {
  const std::size_t k = frame_directions.size();
  if (center.size() != k) throw Error(Errc::dimension_mismatch, "cell center must have one entry per direction");
  const double reach = r + window_radius;
  for (const auto& front : fronts) {
    const double cosine = std::abs(dot(front.normal, axis));
    if (std::acos(std::min(1.0, cosine)) > half_angle) continue;

    const std::size_t n = front.normal.size();
    Eigen::MatrixXd a(n, k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t c = 0; c < n; ++c) a(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = frame_directions[i][c];
    }
    const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(front.normal.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd alpha = a.colPivHouseholderQr().solve(target);
    if ((a * alpha - target).norm() > 1e-9) return true;  // slab is unbounded along the normal

    double projected = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      projected += alpha[static_cast<Eigen::Index>(i)] * center[i];
      spread += std::abs(alpha[static_cast<Eigen::Index>(i)]);
    }
    if (std::abs(front.offset - projected) < reach * spread) return true;
  }
  return false;
}

}  // namespace dstft
