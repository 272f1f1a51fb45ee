#pragma once

#include <stdexcept>
#include <string>

namespace hlx {

enum class ErrorKind {
  evaluation,
  input,
  resolution,
  locality,
  degenerate_stencil,
  level,
  topology,
  fit,
  margin,
  precondition,
  grid_mismatch,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hlx
