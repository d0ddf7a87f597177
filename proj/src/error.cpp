#include "mvver/error.hpp"

namespace mvver {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::empty_dataset: return "empty_dataset";
    case ErrorCode::label_out_of_range: return "label_out_of_range";
    case ErrorCode::class_too_small: return "class_too_small";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::id_mismatch: return "id_mismatch";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace mvver
