#pragma once

#include <stdexcept>
#include <string>

namespace tcbo {

// Failure categories carried across the library boundary. The C API maps
// these one-to-one onto tcbo_status codes.
enum class ErrorKind {
  invalid_argument,
  parse,
  dimension_mismatch,
  unsupported_structure,
  invalid_counting_numbers,
  schedule_invalid,
  not_a_reparameterization,
  not_a_tree,
  too_large,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace tcbo
