#include "exactci/error.hpp"

namespace exactci {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_log_concave: return "NotLogConcave";
    case ErrorKind::out_of_support: return "OutOfSupport";
    case ErrorKind::inadmissible_infinite_theta: return "InadmissibleInfiniteTheta";
    case ErrorKind::k_equals_x: return "KEqualsX";
    case ErrorKind::bad_n: return "BadN";
    case ErrorKind::empty_support: return "EmptySupport";
    case ErrorKind::degenerate_support: return "DegenerateSupport";
    case ErrorKind::bad_alpha: return "BadAlpha";
    case ErrorKind::bad_delta: return "BadDelta";
    case ErrorKind::divergent_search: return "DivergentSearch";
    case ErrorKind::unbounded_enumeration: return "UnboundedEnumeration";
    case ErrorKind::precondition: return "Precondition";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<Index> where)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      where_(where) {}

}  // namespace exactci
