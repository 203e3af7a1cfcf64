#pragma once

#include <stdexcept>
#include <string>

namespace itrace {

/// Root of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A session or config violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A document could not be parsed; the message names the location.
class ParseError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

/// Input video could not be opened or decoded.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Raised by a render pipeline stage; `stage()` names it ("decode", "encode", ...).
class RenderError : public Error {
 public:
  RenderError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace itrace
