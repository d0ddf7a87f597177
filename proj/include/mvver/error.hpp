#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvver {

enum class ErrorCode {
  invalid_argument,
  parse_error,
  empty_dataset,
  label_out_of_range,
  class_too_small,
  dimension_mismatch,
  id_mismatch,
  divergence,
  io_error,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code is what the CLI reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mvver
