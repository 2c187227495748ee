#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rscm {

enum class Errc {
  empty_mask,
  dimension_mismatch,
  out_of_bounds,
  coincident_points,
  ineligible_instance,
  unknown_blur_kind,
  invalid_record,
  template_gap,
  missing_slot,
  empty_input,
  missing_qid,
  missing_file,
  bad_dimensions,
  non_binary_mask,
  bad_format,
  io_failure,
  parse_error,
  checksum_mismatch,
  duplicate_triple_id,
  unknown_triple_id,
  missing_prediction,
  empty_gold,
  unknown_qid,
  basis_mismatch,
  config_error,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Error(Errc code, const std::string& what, std::size_t line)
      : std::runtime_error(std::string(errc_name(code)) + ": line " + std::to_string(line) +
                           ": " + what),
        code_(code),
        line_(line) {}

  Errc code() const noexcept { return code_; }
  /// 1-based line number for parse errors.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  Errc code_;
  std::optional<std::size_t> line_;
};

}  // namespace rscm
