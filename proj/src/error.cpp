#include "a11yrev/error.hpp"

namespace a11yrev {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return "invalid argument";
    case ErrorCode::Io:
      return "i/o error";
    case ErrorCode::Format:
      return "format error";
    case ErrorCode::Data:
      return "data error";
    case ErrorCode::NotFound:
      return "not found";
    case ErrorCode::VersionMismatch:
      return "version mismatch";
    case ErrorCode::Checksum:
      return "checksum error";
    case ErrorCode::Provider:
      return "embedding provider error";
  }
  return "unknown error";
}

}  // namespace a11yrev
