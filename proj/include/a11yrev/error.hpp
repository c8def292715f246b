#pragma once

#include <stdexcept>
#include <string>

namespace a11yrev {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Format,
  Data,
  NotFound,
  VersionMismatch,
  Checksum,
  Provider,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; the C API maps `code()` onto its
// status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace a11yrev
