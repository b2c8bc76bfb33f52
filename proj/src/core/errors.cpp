#include "edgebook/core/errors.hpp"

namespace edgebook {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyRule: return "EmptyRule";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kPartitionViolation: return "PartitionViolation";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kPartialAnnotationFailure: return "PartialAnnotationFailure";
    case ErrorCode::kDuplicateTask: return "DuplicateTask";
    case ErrorCode::kInvalidTaskId: return "InvalidTaskId";
    case ErrorCode::kTaskNotFound: return "TaskNotFound";
    case ErrorCode::kCorpusAlreadySet: return "CorpusAlreadySet";
    case ErrorCode::kCorpusNotSet: return "CorpusNotSet";
    case ErrorCode::kIterationNotFound: return "IterationNotFound";
    case ErrorCode::kNonContiguousIteration: return "NonContiguousIteration";
    case ErrorCode::kVersionExists: return "VersionExists";
    case ErrorCode::kVersionNotFound: return "VersionNotFound";
    case ErrorCode::kTaskBusy: return "TaskBusy";
    case ErrorCode::kStoreCorrupted: return "StoreCorrupted";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kNoGoldLabels: return "NoGoldLabels";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace edgebook
