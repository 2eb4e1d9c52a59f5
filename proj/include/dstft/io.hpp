#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "dstft/lattice.hpp"
#include "dstft/transform.hpp"

namespace dstft {

/// Sample type written to the sidecar. `automatic` picks f64 when every
/// imaginary part is exactly zero, c128 otherwise.
enum class Dtype { automatic, f64, c128 };

/// Writes "SFLD v1": a JSON header at `header_path` and a little-endian
/// row-major sidecar next to it (same stem, `.bin`). `extra` is merged into
/// the header under "manifest" when not null.
void write_field(const SampledField& field, const std::filesystem::path& header_path,
                 Dtype dtype = Dtype::automatic, const nlohmann::json& extra = nullptr);

/// Reads an SFLD v1 header and its sidecar. Throws Errc::io for missing or
/// short files and Errc::parse for malformed headers.
SampledField read_field(const std::filesystem::path& header_path);

/// Writes "DSTC v1": frame, window grammar strings, both lattices, the
/// signal origin and provenance in the header; c128 values in the sidecar.
void write_coefficients(const CoefficientField& coeffs, const std::filesystem::path& header_path,
                        const nlohmann::json& extra = nullptr);

CoefficientField read_coefficients(const std::filesystem::path& header_path);

nlohmann::json lattice_to_json(const Lattice& lattice);
Lattice lattice_from_json(const nlohmann::json& j);

/// Header and data path conventions shared by both formats.
std::filesystem::path sidecar_path(const std::filesystem::path& header_path);

}  // namespace dstft
