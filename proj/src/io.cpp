#include "dstft/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "dstft/error.hpp"

namespace dstft {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFieldVersion = "SFLD v1";
constexpr const char* kCoeffVersion = "DSTC v1";

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffu);
    return r;
  }
  return v;
}

void put(std::string& out, double x) {
  const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(x));
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.append(buf, 8);
}

double get(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  return std::bit_cast<double>(to_little(bits));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw Error(Errc::io, "write failed for '" + path.string() + "'");
}

std::string read_all(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return data;
}

json read_header(const fs::path& path, const char* version) {
  json header;
  try {
    header = json::parse(read_all(path));
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, "'" + path.string() + "': " + e.what());
  }
  if (!header.is_object() || header.value("version", std::string{}) != version) {
    throw Error(Errc::parse, "'" + path.string() + "' is not a " + std::string(version) + " header");
  }
  return header;
}

std::string encode(const std::vector<Complex>& values, bool real) {
  std::string out;
  out.reserve(values.size() * (real ? 8 : 16));
  for (const auto& v : values) {
    put(out, v.real());
    if (!real) put(out, v.imag());
  }
  return out;
}

std::vector<Complex> decode(const fs::path& path, std::size_t count, bool real) {
  const std::string raw = read_all(path);
  const std::size_t width = real ? 8 : 16;
  if (raw.size() != count * width) {
    throw Error(Errc::io, "'" + path.string() + "' holds " + std::to_string(raw.size()) +
                              " bytes, expected " + std::to_string(count * width));
  }
  std::vector<Complex> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const char* p = raw.data() + i * width;
    values[i] = real ? Complex{get(p), 0.0} : Complex{get(p), get(p + 8)};
  }
  return values;
}

fs::path data_path(const fs::path& header_path, const json& header) {
  const auto name = header.at("data_file").get<std::string>();
  return header_path.parent_path() / name;
}

template <class Fn>
auto guarded(const fs::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(Errc::parse, "'" + path.string() + "': " + e.what());
  }
}

}  // namespace

fs::path sidecar_path(const fs::path& header_path) {
  fs::path p = header_path;
  return p.replace_extension(".bin");
}

json lattice_to_json(const Lattice& lattice) {
  return {{"origin", lattice.origin()}, {"step", lattice.step()}, {"count", lattice.count()}};
}

Lattice lattice_from_json(const json& j) {
  return Lattice::make(j.at("origin").get<std::vector<double>>(), j.at("step").get<std::vector<double>>(),
                       j.at("count").get<std::vector<std::size_t>>());
}

void write_field(const SampledField& field, const fs::path& header_path, Dtype dtype, const json& extra) {
  const bool imag_free = std::all_of(field.values.begin(), field.values.end(),
                                     [](const Complex& v) { return v.imag() == 0.0; });
  if (dtype == Dtype::f64 && !imag_free) {
    throw Error(Errc::invalid_argument, "f64 output requested for a field with nonzero imaginary parts");
  }
  const bool real = dtype == Dtype::f64 || (dtype == Dtype::automatic && imag_free);
  const fs::path bin = sidecar_path(header_path);
  json header = {{"version", kFieldVersion},
                 {"dim", field.lattice.dim()},
                 {"origin", field.lattice.origin()},
                 {"step", field.lattice.step()},
                 {"count", field.lattice.count()},
                 {"dtype", real ? "f64" : "c128"},
                 {"label", field.label},
                 {"data_file", bin.filename().string()}};
  if (!extra.is_null()) header["manifest"] = extra;
  write_text(bin, encode(field.values, real));
  write_text(header_path, header.dump(2) + "\n");
}

SampledField read_field(const fs::path& header_path) {
  const json header = read_header(header_path, kFieldVersion);
  return guarded(header_path, [&] {
    const Lattice lattice = lattice_from_json(header);
    if (header.at("dim").get<std::size_t>() != lattice.dim()) {
      throw Error(Errc::parse, "'" + header_path.string() + "': dim disagrees with origin/step/count");
    }
    const auto dtype = header.at("dtype").get<std::string>();
    if (dtype != "f64" && dtype != "c128") {
      throw Error(Errc::parse, "'" + header_path.string() + "': unknown dtype '" + dtype + "'");
    }
    auto values = decode(data_path(header_path, header), lattice.size(), dtype == "f64");
    return SampledField(lattice, std::move(values), header.value("label", std::string{}));
  });
}

void write_coefficients(const CoefficientField& coeffs, const fs::path& header_path, const json& extra) {
  const fs::path bin = sidecar_path(header_path);
  std::vector<std::string> analysis, synthesis;
  for (const auto& w : coeffs.bank.analysis) analysis.push_back(w.grammar());
  for (const auto& w : coeffs.bank.synthesis) synthesis.push_back(w.grammar());
  json header = {
      {"version", kCoeffVersion},
      {"frame",
       {{"n", coeffs.frame.n()},
        {"k", coeffs.frame.k()},
        {"directions", coeffs.frame.directions()},
        {"completion", to_string(coeffs.frame.completion())}}},
      {"analysis_windows", analysis},
      {"synthesis_windows", synthesis},
      {"shift_lattice", lattice_to_json(coeffs.shift_lattice)},
      {"freq_lattice", {{"signal_step", coeffs.freq_lattice.signal_step()}, {"count", coeffs.freq_lattice.count()}}},
      {"signal_origin", coeffs.signal_origin},
      {"provenance", to_string(coeffs.provenance)},
      {"dtype", "c128"},
      {"layout", "shift-major, centered frequency bins, row-major"},
      {"data_file", bin.filename().string()}};
  if (!extra.is_null()) header["manifest"] = extra;
  write_text(bin, encode(coeffs.values, false));
  write_text(header_path, header.dump(2) + "\n");
}

CoefficientField read_coefficients(const fs::path& header_path) {
  const json header = read_header(header_path, kCoeffVersion);
  return guarded(header_path, [&] {
    CoefficientField out;
    const auto& frame = header.at("frame");
    out.frame = build_frame(frame.at("directions").get<std::vector<std::vector<double>>>(),
                            frame.at("n").get<std::size_t>());
    std::vector<Window> analysis, synthesis;
    for (const auto& s : header.at("analysis_windows")) analysis.push_back(Window::parse(s.get<std::string>()));
    for (const auto& s : header.at("synthesis_windows")) synthesis.push_back(Window::parse(s.get<std::string>()));
    out.bank = WindowBank(std::move(analysis), std::move(synthesis));
    out.shift_lattice = lattice_from_json(header.at("shift_lattice"));
    const auto& freq = header.at("freq_lattice");
    out.freq_lattice = FrequencyLattice(freq.at("signal_step").get<std::vector<double>>(),
                                        freq.at("count").get<std::vector<std::size_t>>());
    out.signal_origin = header.at("signal_origin").get<std::vector<double>>();
    out.provenance = provenance_from_string(header.at("provenance").get<std::string>());
    if (out.frame.k() != out.bank.k() || out.shift_lattice.dim() != out.frame.k() ||
        out.freq_lattice.dim() != out.frame.n() || out.signal_origin.size() != out.frame.n()) {
      throw Error(Errc::parse, "'" + header_path.string() + "': inconsistent dimensions");
    }
    out.values = decode(data_path(header_path, header), out.shift_size() * out.freq_size(), false);
    return out;
  });
}

}  // namespace dstft
