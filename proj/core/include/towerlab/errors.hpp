#pragma once

#include <stdexcept>
#include <string>

namespace towerlab {

// Base of every error the library throws. The CLI maps each subclass to its
// own diagnostic prefix.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

class InvalidInput : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "invalid-input"; }
};

class Unsupported : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "unsupported"; }
};

// A configured size cap (cells, ball size, lamp window) was exceeded.
class ResourceExhausted : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "resource-exhausted"; }
};

class CapExceeded : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "cap-exceeded"; }
};

class InvarianceViolation : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "invariance-violation"; }
};

// Broken internal guarantee; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "internal-error"; }
};

}  // namespace towerlab
