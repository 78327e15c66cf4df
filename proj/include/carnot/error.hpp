#pragma once

#include <stdexcept>
#include <string>

namespace carnot {

enum class ErrorKind {
  Parse,            // malformed input text
  Validation,       // well-formed input that violates a contract
  Resource,         // a configured size cap was exceeded
  Domain,           // operands from different algebras, lambda = 0, ...
  Unsupported,      // input outside the supported class
  NoCertifiedPath,  // path search could not produce an exact witness
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace carnot
