#include "core/error.hpp"

namespace sfwi {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Domain: return "domain_error";
    case ErrorCode::Parse: return "parse_error";
    case ErrorCode::Io: return "io_error";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Internal: return "internal_error";
  }
  return "unknown";
}

}  // namespace sfwi
