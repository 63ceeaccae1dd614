#pragma once

#include <stdexcept>
#include <string>

namespace docrec {

/// Precondition violation on a numeric or structural argument.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed on-disk representation (JSON shape, UTF-8).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace docrec
