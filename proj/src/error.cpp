#include "mcc/error.hpp"

namespace mcc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::dimension: return "dimension error";
    case ErrorKind::constraint: return "constraint error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::version: return "version error";
    case ErrorKind::io: return "io error";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::bounds: return "bounds error";
    case ErrorKind::internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace mcc
