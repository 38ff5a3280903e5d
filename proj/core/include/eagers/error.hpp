#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eagers {

enum class ErrorKind {
  kInvalidGeometry,
  kInvalidSelection,
  kShape,
  kDegenerateVector,
  kIncompleteEmbedding,
  kInvalidReference,
  kEmptyRun,
  kPrecondition,
  kBackendUnavailable,
  kProtocol,
  kConfig,
  kFormat,
  kEmptyDataset,
  kDuplicateId,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eagers
