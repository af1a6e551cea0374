#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gapforge {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kNetworkError,
  kParseError,
  kNoLanglink,
  kProviderError,
  kFormatError,
  kDimensionMismatch,
  kPlanMismatch,
  kTopicMismatch,
  kInvalidUrl,
  kMissingParagraph,
  kRevisionMismatch,
  kDuplicateFactId,
  kIoError,
  kSchemaError,
  kBindError,
  kConfigError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kNetworkError: return "NetworkError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNoLanglink: return "NoLanglink";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kPlanMismatch: return "PlanMismatch";
    case ErrorCode::kTopicMismatch: return "TopicMismatch";
    case ErrorCode::kInvalidUrl: return "InvalidUrl";
    case ErrorCode::kMissingParagraph: return "MissingParagraph";
    case ErrorCode::kRevisionMismatch: return "RevisionMismatch";
    case ErrorCode::kDuplicateFactId: return "DuplicateFactId";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kBindError: return "BindError";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above. The
// message is prefixed with the code name so logs stay greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  // Re-raise with extra context in front of the detail, keeping the code.
  [[noreturn]] void rethrow_with(std::string_view context) const {
    throw Error(code_, std::string(context) + ": " + detail_);
  }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace gapforge
