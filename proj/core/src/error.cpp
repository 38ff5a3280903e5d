#include "eagers/error.hpp"

namespace eagers {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidGeometry: return "invalid-geometry";
    case ErrorKind::kInvalidSelection: return "invalid-selection";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kDegenerateVector: return "degenerate-vector";
    case ErrorKind::kIncompleteEmbedding: return "incomplete-embedding";
    case ErrorKind::kInvalidReference: return "invalid-reference";
    case ErrorKind::kEmptyRun: return "empty-run";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kBackendUnavailable: return "backend-unavailable";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kEmptyDataset: return "empty-dataset";
    case ErrorKind::kDuplicateId: return "duplicate-id";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace eagers
