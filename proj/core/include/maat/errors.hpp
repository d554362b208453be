#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace maat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad JSON, bad CSV, unparseable dates. Messages carry
/// line numbers where the input is line-oriented.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a documented invariant
/// (e.g. stored positives disagreeing with the scans map).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failure; the message always names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Bad request from the caller (unknown strategy kind, malformed flag value).
/// The CLI maps this to exit code 2, everything else to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the process-wide warning sink and returns the previous one.
/// The default sink writes "maat: warning: <message>" to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void emit_warning(const std::string& message);

}  // namespace maat
