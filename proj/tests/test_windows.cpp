#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dstft/directions.hpp"
#include "dstft/error.hpp"
#include "dstft/windows.hpp"

using namespace dstft;

TEST_SUITE("windows") {

TEST_CASE("analytic kinds") {
  const auto hann = Window::hann(2.0);
  const auto bump = Window::bump(1.5);
  const auto gauss = Window::gaussian(0.5);
  CHECK(hann(0.0).real() == 1.0);
  CHECK(bump(0.0).real() == 1.0);
  CHECK(gauss(0.0).real() == 1.0);
  CHECK(hann(1.0).real() == doctest::Approx(0.5));
  CHECK(bump(0.75).real() == doctest::Approx(std::exp(1.0 - 2.25 / (2.25 - 0.5625))));
  CHECK(gauss(1.0).real() == doctest::Approx(std::exp(-2.0)));
  CHECK(hann(2.0) == Complex{});
  CHECK(hann(-2.5) == Complex{});
  CHECK(bump(1.5) == Complex{});
  CHECK(bump(-1.5) == Complex{});
  CHECK(hann.support_radius() == 2.0);
  CHECK_FALSE(gauss.compact());
  CHECK(bump.smooth());
  CHECK_FALSE(hann.smooth());
}

TEST_CASE("grammar parsing") {
  CHECK(Window::parse("gaussian:sigma=1.5").parameter() == 1.5);
  CHECK(Window::parse("gaussian:σ=2").parameter() == 2.0);
  CHECK(Window::parse("hann:a=2.0").kind() == Window::Kind::hann);
  CHECK(Window::parse("bump:a=1.5").kind() == Window::Kind::bump);
  for (const auto* text : {"hann:a=0.75", "bump:a=1", "gaussian:sigma=0.3"}) {
    const auto w = Window::parse(text);
    CHECK(Window::parse(w.grammar()).parameter() == w.parameter());
  }
  auto message = [](const char* text) {
    try {
      Window::parse(text);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::parse);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("triangle:a=1").find("triangle") != std::string::npos);
  CHECK(message("hann:b=1").find("'b'") != std::string::npos);
  CHECK(message("hann:a=x1").find("x1") != std::string::npos);
  CHECK(message("hann") != "");
}

TEST_CASE("custom windows interpolate and vanish outside") {
  const auto lat = Lattice::make({-1.0}, {1.0}, {3});
  const auto w = Window::custom(SampledField(lat, {Complex{0, 0}, Complex{2, 0}, Complex{0, 1}}), "mem");
  CHECK(w(0.5) == Complex{1.0, 0.5});
  CHECK(w(-0.5) == Complex{1.0, 0.0});
  CHECK(w(1.5) == Complex{});
  CHECK_FALSE(w.real_valued());
  CHECK(w.grammar() == "custom:mem");
}

TEST_CASE("pairing against closed forms") {
  // integral exp(-s^2) = sqrt(pi); integral of exp(-s^2/2) exp(-s^2/8) = sqrt(8 pi / 5)
  const auto g1 = Window::gaussian(1.0);
  const auto g2 = Window::gaussian(2.0);
  CHECK(pairing(WindowBank::self_dual({g1})).real() == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
  CHECK(pairing(WindowBank({g1}, {g2})).real() == doctest::Approx(std::sqrt(8.0 * std::numbers::pi / 5.0)).epsilon(1e-10));
  // integral cos^4(pi s / 2a) over (-a, a) = 3a/4
  CHECK(pairing(WindowBank::self_dual({Window::hann(1.0)})).real() == doctest::Approx(0.75).epsilon(1e-6));
  const auto two = pairing(WindowBank::self_dual({g1, Window::hann(1.0)}));
  CHECK(two.real() == doctest::Approx(std::sqrt(std::numbers::pi) * 0.75).epsilon(1e-6));
}

TEST_CASE("degenerate pairing is refused") {
  const auto lat = Lattice::make({-1.0}, {1.0}, {3});
  const auto odd = Window::custom(SampledField(lat, {Complex{-1, 0}, Complex{0, 0}, Complex{1, 0}}), "odd");
  try {
    pairing(WindowBank({odd}, {Window::gaussian(1.0)}));
    FAIL("expected a degenerate pairing");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::pairing_degenerate);
  }
  CHECK_THROWS_AS(WindowBank({odd}, {}), Error);
}

TEST_CASE("ridge atom is the product of shifted windows times a plane wave") {
  const auto frame = build_frame({{0.6, 0.8}}, 2);
  const std::vector<Window> w{Window::gaussian(1.0)};
  const std::vector<double> x{0.3}, xi{1.0, -0.5}, t{0.2, 0.7};
  const double s = 0.6 * 0.2 + 0.8 * 0.7 - 0.3;
  const Complex expected = std::exp(-0.5 * s * s) * std::polar(1.0, 2.0 * std::numbers::pi * (0.2 - 0.35));
  CHECK(std::abs(eval_ridge_atom(w, frame, x, xi, t) - expected) < 1e-14);
}

}
