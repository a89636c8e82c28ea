#include "afmpi/error.hpp"

#include <algorithm>

namespace afmpi {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NotFound:
        return "NotFound";
    case ErrorCode::SchemeInvalid:
        return "SchemeInvalid";
    case ErrorCode::SchemeMismatch:
        return "SchemeMismatch";
    case ErrorCode::IngestError:
        return "IngestError";
    case ErrorCode::IntegrityError:
        return "IntegrityError";
    case ErrorCode::EmptyPoorSet:
        return "EmptyPoorSet";
    case ErrorCode::PartitionError:
        return "PartitionError";
    case ErrorCode::BadCutoffs:
        return "BadCutoffs";
    case ErrorCode::TooLarge:
        return "TooLarge";
    case ErrorCode::ConfigError:
        return "ConfigError";
    case ErrorCode::Usage:
        return "Usage";
    case ErrorCode::Io:
        return "Io";
    case ErrorCode::ContractViolation:
        return "ContractViolation";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message, std::vector<std::string> reasons,
             std::map<std::string, std::string> context)
    : std::runtime_error{message}, code_{code}, reasons_{std::move(reasons)},
      context_{std::move(context)} {}

bool Error::has_reason(std::string_view reason) const noexcept {
    return std::ranges::find(reasons_, reason) != reasons_.end();
}

} // namespace afmpi
