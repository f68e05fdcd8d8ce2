#pragma once

#include <stdexcept>
#include <string>

namespace zrp {

enum class ErrorKind { invalid_argument, numeric, cap_exceeded };

// Single exception type; the kind drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_argument(const std::string& what) {
  throw Error(ErrorKind::invalid_argument, what);
}
[[noreturn]] inline void fail_numeric(const std::string& what) {
  throw Error(ErrorKind::numeric, what);
}
[[noreturn]] inline void fail_cap(const std::string& what) {
  throw Error(ErrorKind::cap_exceeded, what);
}

}  // namespace zrp
