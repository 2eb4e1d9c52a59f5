#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dstft {

enum class Errc {
  invalid_argument,
  dimension_mismatch,
  lattice_mismatch,
  pairing_degenerate,
  dependent_directions,
  singular_b,
  eta_too_large,
  empty_cone,
  unknown_kind,
  parse,
  io,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; the code drives CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dstft
