#pragma once

#include <stdexcept>
#include <string>

namespace fracobs {

enum class ErrorKind {
  parameter,      // argument outside its documented range
  shape,          // fields living on different grids
  data,           // non-finite or otherwise unusable input data
  numerical,      // solver failure, non-finite intermediate
  configuration,  // inconsistent run/scheme configuration
  resolution,     // grid too coarse for the requested quantity
  degenerate,     // fit or report has nothing to measure
  index,          // out-of-range slice/step index
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

inline void require(bool condition, ErrorKind kind, const char* what) {
  if (!condition) fail(kind, what);
}

}  // namespace fracobs
