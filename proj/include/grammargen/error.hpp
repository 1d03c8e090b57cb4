#pragma once

#include <stdexcept>
#include <string>

namespace grammargen {

enum class ErrorKind {
  invalid_argument,
  validation,
  io,
  hash_collision,
  exhausted,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace grammargen
