#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edgebook {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyRule,
  kUnknownLabel,
  kProviderUnavailable,
  kMalformedResponse,
  kPartitionViolation,
  kDimensionMismatch,
  kEmptyInput,
  kEmptyCorpus,
  kPartialAnnotationFailure,
  kDuplicateTask,
  kInvalidTaskId,
  kTaskNotFound,
  kCorpusAlreadySet,
  kCorpusNotSet,
  kIterationNotFound,
  kNonContiguousIteration,
  kVersionExists,
  kVersionNotFound,
  kTaskBusy,
  kStoreCorrupted,
  kIdMismatch,
  kNoGoldLabels,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Every failure the library reports is an Error. Provider errors carry the
// document they were raised for; aggregate failures list the affected ids.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(ErrorCode code, const std::string& message, std::string doc_id)
      : std::runtime_error(message), code_(code), doc_id_(std::move(doc_id)) {}
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> details)
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const std::optional<std::string>& doc_id() const noexcept {
    return doc_id_;
  }
  [[nodiscard]] const std::vector<std::string>& details() const noexcept {
    return details_;
  }

 private:
  ErrorCode code_;
  std::optional<std::string> doc_id_;
  std::vector<std::string> details_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace edgebook
