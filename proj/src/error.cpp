#include "dms/error.hpp"

namespace dms {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::DuplicateUsername: return "DuplicateUsername";
    case ErrorCode::WeakPassword: return "WeakPassword";
    case ErrorCode::InvalidCredentials: return "InvalidCredentials";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::Forbidden: return "Forbidden";
    case ErrorCode::NoAvailability: return "NoAvailability";
    case ErrorCode::CapacityConflict: return "CapacityConflict";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::HoldExpired: return "HoldExpired";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Format: return "FormatError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
    case ErrorCode::AddressInUse: return "AddressInUse";
    case ErrorCode::Internal: return "InternalError";
  }
  return "InternalError";
}

}  // namespace dms
