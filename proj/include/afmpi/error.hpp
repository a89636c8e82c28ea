#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace afmpi {

enum class ErrorCode {
    NotFound,
    SchemeInvalid,
    SchemeMismatch,
    IngestError,
    IntegrityError,
    EmptyPoorSet,
    PartitionError,
    BadCutoffs,
    TooLarge,
    ConfigError,
    Usage,
    Io,
    ContractViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library error. `reasons` carries machine-readable sub-codes (for example
/// every violation found while validating a scheme); `context` carries
/// key/value details such as the offending row and column.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &message, std::vector<std::string> reasons = {},
          std::map<std::string, std::string> context = {});

    ErrorCode code() const noexcept { return code_; }
    const std::vector<std::string> &reasons() const noexcept { return reasons_; }
    const std::map<std::string, std::string> &context() const noexcept { return context_; }
    bool has_reason(std::string_view reason) const noexcept;

  private:
    ErrorCode code_;
    std::vector<std::string> reasons_;
    std::map<std::string, std::string> context_;
};

} // namespace afmpi
