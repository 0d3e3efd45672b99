#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wplap {

enum class ErrorKind {
  invalid_input,
  not_positive_definite,
  degenerate_quadrature,
  overflow,
  domain,
  coverage,
  mesh,
  assembly,
  convergence,
  stall,
  inconsistency,
  io,
  config,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace wplap
