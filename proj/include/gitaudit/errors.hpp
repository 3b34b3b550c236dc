#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gitaudit {

/// Base class of every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// catalog
class AuthError : public Error {
 public:
  using Error::Error;
};
class TransportError : public Error {
 public:
  using Error::Error;
};
class FixtureError : public Error {
 public:
  using Error::Error;
};

// pipeline
class WorkDirError : public Error {
 public:
  using Error::Error;
};

// shortlog / external tool
class NotARepository : public Error {
 public:
  using Error::Error;
};
class ToolFailure : public Error {
 public:
  ToolFailure(const std::string& what, std::string stderr_text)
      : Error(what), stderr_text_(std::move(stderr_text)) {}
  const std::string& stderr_text() const noexcept { return stderr_text_; }

 private:
  std::string stderr_text_;
};

// analytics
class EmptyDatabase : public Error {
 public:
  using Error::Error;
};
class DegenerateInput : public Error {
 public:
  using Error::Error;
};
class FamilyMismatch : public Error {
 public:
  using Error::Error;
};

// persistence
class IoError : public Error {
 public:
  using Error::Error;
};
class CorruptRecord : public Error {
 public:
  CorruptRecord(std::size_t line, const std::string& why)
      : Error("corrupt record at line " + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};
class CanonicalityViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace gitaudit
