#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace exactci {

using Index = std::int64_t;

enum class ErrorKind {
  not_log_concave,
  out_of_support,
  inadmissible_infinite_theta,
  k_equals_x,
  bad_n,
  empty_support,
  degenerate_support,
  bad_alpha,
  bad_delta,
  divergent_search,
  unbounded_enumeration,
  precondition,
};

// Stable names used in CLI messages and logs.
std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<Index> where = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  // Support point the error refers to, when there is one.
  std::optional<Index> where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::optional<Index> where_;
};

}  // namespace exactci
