#pragma once

#include <stdexcept>
#include <string>

namespace subscat {

/// Failure categories. The C API maps each one onto a status code.
enum class ErrorKind {
  domain,     // inputs outside the model's domain (k <= 0, b <= a, asymmetric barrier, ...)
  numerical,  // a tolerance or numerical-health check failed
  ambiguous,  // odd/even branch cannot be told apart
  undefined,  // the requested quantity does not exist (e.g. reflection time at R = 0)
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace subscat
