#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>

#include "doctest.h"
#include "dstft/error.hpp"
#include "dstft/io.hpp"

using namespace dstft;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dstft_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::invalid_argument;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("field round trip in both dtypes") {
  const auto lat = Lattice::make({-1.0, 0.5}, {0.25, 0.125}, {4, 3});
  auto real = SampledField::from_function(lat, [](const std::vector<double>& t) { return Complex{t[0] + 10.0 * t[1], 0.0}; });
  const auto path = scratch("real.json");
  write_field(real, path, Dtype::automatic, nlohmann::json{{"command", "gen"}});
  CHECK(fs::file_size(sidecar_path(path)) == 12 * sizeof(double));
  const auto back = read_field(path);
  CHECK(back.values == real.values);
  CHECK(back.lattice.origin() == lat.origin());
  CHECK(back.lattice.step() == lat.step());
  CHECK(back.lattice.count() == lat.count());
  std::ifstream in(path);
  const auto header = nlohmann::json::parse(in);
  CHECK(header.at("manifest").at("command") == "gen");
  CHECK(header.at("dtype") == "f64");

  auto cplx = real;
  cplx.values[5] = Complex{0.1, -1e-300};
  write_field(cplx, path);
  CHECK(fs::file_size(sidecar_path(path)) == 12 * 2 * sizeof(double));
  CHECK(read_field(path).values == cplx.values);
  CHECK_THROWS_AS(write_field(cplx, path, Dtype::f64), Error);
}

TEST_CASE("coefficient round trip keeps the frame and windows") {
  const auto lat = Lattice::make({-2.0, -2.0}, {0.25, 0.25}, {16, 16});
  const auto f = SampledField::from_function(lat, [](const std::vector<double>& t) { return Complex{std::exp(-t[0] * t[0] - t[1] * t[1]), t[1]}; });
  const auto frame = build_frame({{1.0, 2.0}}, 2);
  const WindowBank bank({Window::hann(1.5)}, {Window::gaussian(0.75)});
  const auto c = dstft_forward(f, frame, bank, Lattice::make({-1.0}, {0.5}, {5}));
  const auto path = scratch("coeffs.json");
  write_coefficients(c, path);
  const auto back = read_coefficients(path);
  CHECK(back.values == c.values);
  CHECK(back.bank.analysis[0].grammar() == "hann:a=1.5");
  CHECK(back.bank.synthesis[0].grammar() == "gaussian:sigma=0.75");
  CHECK(back.frame.directions()[0][1] == doctest::Approx(2.0 / std::sqrt(5.0)));
  CHECK(back.signal_origin == c.signal_origin);
  CHECK(back.signal_lattice().count() == lat.count());
  CHECK(back.provenance == c.provenance);
  CHECK(back.shift_lattice.count() == c.shift_lattice.count());
}

TEST_CASE("malformed inputs") {
  CHECK(code_of([] { read_field(scratch("missing.json")); }) == Errc::io);
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{ not json";
  CHECK(code_of([&] { read_field(bad); }) == Errc::parse);
  std::ofstream(bad) << R"({"version": "SFLD v7"})";
  CHECK(code_of([&] { read_field(bad); }) == Errc::parse);

  const auto lat = Lattice::make({0.0}, {1.0}, {8});
  const auto path = scratch("short.json");
  write_field(SampledField(lat), path);
  fs::resize_file(sidecar_path(path), 3 * sizeof(double));
  CHECK(code_of([&] { read_field(path); }) == Errc::io);
  fs::remove(sidecar_path(path));
  CHECK(code_of([&] { read_field(path); }) == Errc::io);
  CHECK(code_of([&] { read_coefficients(path); }) == Errc::parse);
}

TEST_CASE("lattice json and sidecar naming") {
  const auto lat = Lattice::make({-3.0, 1.0}, {0.5, 0.25}, {7, 9});
  const auto back = lattice_from_json(lattice_to_json(lat));
  CHECK(back.origin() == lat.origin());
  CHECK(back.count() == lat.count());
  CHECK(sidecar_path("out/f.json") == fs::path("out/f.bin"));
  CHECK_THROWS_AS(lattice_from_json(nlohmann::json{{"origin", {0.0}}, {"step", {0.0}}, {"count", {4}}}), Error);
}

}
