#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dms {

enum class ErrorCode {
  Validation,
  NotFound,
  DuplicateId,
  DuplicateKey,
  DuplicateUsername,
  WeakPassword,
  InvalidCredentials,
  Unauthorized,
  Forbidden,
  NoAvailability,
  CapacityConflict,
  InvalidState,
  HoldExpired,
  Unreachable,
  EmptyGraph,
  DanglingEdge,
  Io,
  Format,
  Config,
  CorruptSnapshot,
  AddressInUse,
  Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for every module; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dms
