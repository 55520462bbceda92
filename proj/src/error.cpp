#include "qcslab/error.hpp"

namespace qcslab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidValue: return "invalid-value";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::DegenerateMatrix: return "degenerate-matrix";
    case ErrorKind::DegenerateSupport: return "degenerate-support";
    case ErrorKind::DegenerateRange: return "degenerate-range";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace qcslab
