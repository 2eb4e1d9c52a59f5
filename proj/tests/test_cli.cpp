#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "../tools/cli.hpp"
#include "dstft/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

struct Sandbox {
  fs::path dir;
  explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("dstft_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  std::string at(const std::string& file) const { return (dir / file).string(); }
  Run operator()(std::vector<std::string> args) const {
    args.insert(args.begin(), {"--out-dir", dir.string()});
    std::ostringstream out, err;
    const int code = dstft::cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }
  json read_json(const std::string& file) const {
    std::ifstream in(dir / file);
    return json::parse(in);
  }
};

double last_number(const std::string& line) { return std::stod(line.substr(line.rfind(' ') + 1)); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen, dstft, synth and roundtrip agree") {
  Sandbox box("pipeline");
  auto r = box({"gen", "--kind", "gaussian", "--sigma", "1", "--origin", "-8", "--step", "0.125", "--count", "128,128",
                "--out", "f.json"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(box.at("f.bin")));
  CHECK(box.read_json("gen.manifest.json").at("command") == "gen");
  CHECK(box.read_json("f.json").at("manifest").at("command") == "gen");

  r = box({"roundtrip", "--in", box.at("f.json"), "--windows", "gaussian:sigma=1", "--shift-lower", "-6",
           "--shift-upper", "6", "--shift-step", "0.25"});
  REQUIRE(r.code == 0);
  CHECK(last_number(r.out) <= 1e-3);

  r = box({"dstft", "--in", box.at("f.json"), "--windows", "gaussian:sigma=1", "--shift-lower", "-6",
           "--shift-upper", "6", "--shift-step", "0.25", "--out", "c.json"});
  REQUIRE(r.code == 0);
  CHECK(box.read_json("c.json").at("manifest").at("command") == "dstft");
  r = box({"synth", "--in", box.at("c.json"), "--out", "back.json"});
  REQUIRE(r.code == 0);
  const auto f = dstft::read_field(box.at("f.json"));
  const auto back = dstft::read_field(box.at("back.json"));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    num += std::norm(back.values[i] - f.values[i]);
    den += std::norm(f.values[i]);
  }
  CHECK(std::sqrt(num / den) <= 1e-3);
  CHECK(box.read_json("synth.manifest.json").at("config").contains("pairing"));
}

TEST_CASE("parseval reports both the regular and the degenerate case") {
  Sandbox box("parseval");
  REQUIRE(box({"gen", "--kind", "gaussian", "--origin", "-8", "--step", "0.25", "--count", "64", "--out", "g.json"}).code == 0);
  REQUIRE(box({"gen", "--kind", "jump_ridge", "--dirs", "1", "--origin", "-8", "--step", "0.25", "--count", "64",
               "--out", "j.json"}).code == 0);
  auto r = box({"parseval", "--in", box.at("g.json"), "--shift-lower", "-6", "--shift-upper", "6", "--shift-step", "0.25"});
  REQUIRE(r.code == 0);
  CHECK(last_number(r.out) <= 1e-3);
  r = box({"parseval", "--in", box.at("g.json"), "--in2", box.at("j.json"), "--shift-lower", "-6", "--shift-upper",
           "6", "--shift-step", "0.25"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("rhs degenerate", 0) == 0);
  CHECK(box.read_json("parseval.json").at("rel_err").is_null());
}

TEST_CASE("window-compare single report and table") {
  Sandbox box("compare");
  REQUIRE(box({"gen", "--kind", "gaussian", "--origin", "-8", "--step", "0.03125", "--count", "512", "--out", "g.json"}).code == 0);
  auto r = box({"window-compare", "--in", box.at("g.json"), "--target", "hann:a=1", "--interior", "4",
                "--shift-lower", "-6", "--shift-upper", "6", "--shift-step", "0.125"});
  REQUIRE(r.code == 0);
  CHECK(last_number(r.out) <= 1e-2);

  std::ofstream(box.at("recipe.json")) << R"({"version": "SIG v1", "kind": "gaussian", "sigma": 1.0})";
  r = box({"window-compare", "--recipe", box.at("recipe.json"), "--levels", "0.25:1,0.125:0.5", "--interior", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("signal_step,shift_step,rel_err,order\n", 0) == 0);
  CHECK(fs::exists(box.at("window_compare.csv")));
  CHECK(box.read_json("window_compare.json").at("convergence").size() == 2);
}

TEST_CASE("wavefront map with ground truth and alternates") {
  Sandbox box("wavefront");
  REQUIRE(box({"gen", "--kind", "jump_ridge", "--dirs", "1", "--origin", "-8", "--step", "0.015625", "--count",
               "1024", "--out", "j.json"}).code == 0);
  std::ofstream(box.at("truth.json")) << R"({"kind": "jump_ridge", "u": [1.0], "offset": 0.0, "sigma": 1.0})";
  const auto r = box({"wavefront", "--in", box.at("j.json"), "--centers", "0;3", "--r-min", "4", "--r-max", "16",
                      "--threshold", "2", "--shift-step", "0.125", "--truth", box.at("truth.json"), "--alt-windows",
                      "bump:a=0.5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("x0,d0,n_hat,r2,verdict,expected\n", 0) == 0);
  const auto report = box.read_json("wavefront.json");
  CHECK(report.at("truth_mismatches") == 0);
  CHECK(report.at("robustness").at("agree") == true);
  CHECK(report.at("manifest").at("command") == "wavefront");
  CHECK(fs::exists(box.at("wavefront.manifest.json")));
}

TEST_CASE("exit codes") {
  Sandbox box("errors");
  auto r = box({"dstft", "--in", box.at("nope.json")});
  CHECK(r.code == 3);
  CHECK(r.err.rfind("error: ", 0) == 0);
  CHECK(box({"gen", "--kind", "chirp", "--origin", "0", "--step", "1", "--count", "8"}).code == 2);
  CHECK(box({"gen", "--kind", "gaussian", "--origin", "0", "--step", "-1", "--count", "8"}).code == 2);
  CHECK(box({"frobnicate"}).code == 2);
  CHECK(box({"--deterministic", "--fast-reduce", "gen"}).code == 2);

  REQUIRE(box({"gen", "--kind", "gaussian", "--origin", "-4", "--step", "0.125", "--count", "64", "--out", "g.json"}).code == 0);
  CHECK(box({"roundtrip", "--in", box.at("g.json"), "--windows", "hann:a=1", "--synthesis-windows",
             "custom:" + box.at("odd.json")}).code == 3);
  dstft::write_field(dstft::SampledField::from_function(dstft::Lattice::make({-2.0}, {0.01}, {401}),
                                                        [](const std::vector<double>& s) {
                                                          return dstft::Complex{s[0] * std::exp(-s[0] * s[0]), 0.0};
                                                        }),
                     box.at("odd.json"));
  r = box({"roundtrip", "--in", box.at("g.json"), "--windows", "gaussian:sigma=1", "--synthesis-windows",
           "custom:" + box.at("odd.json")});
  CHECK(r.code == 4);
  CHECK(box({"wavefront", "--in", box.at("g.json"), "--windows", "gaussian:sigma=1", "--centers", "0"}).code == 2);
  CHECK(box({"wavefront", "--in", box.at("g.json"), "--centers", "0", "--half-angle", "2"}).code == 2);
}

}
