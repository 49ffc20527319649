#pragma once

#include <stdexcept>
#include <string>

namespace fedsight {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Bad input data, schema violations, config mistakes. CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed file content; carries a best-effort location.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, const std::string& location)
      : Error(location.empty() ? message : message + " (" + location + ")"),
        location_(location) {}
  explicit ParseError(const std::string& message) : ParseError(message, "") {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// No observation qualifies under the availability cutoff.
class MissingDataError : public Error {
 public:
  MissingDataError(const std::string& variable, const std::string& meeting_id)
      : Error("missing data: no qualifying observation for '" + variable +
              "' at meeting " + meeting_id),
        variable_(variable),
        meeting_id_(meeting_id) {}
  const std::string& variable() const { return variable_; }
  const std::string& meeting_id() const { return meeting_id_; }

 private:
  std::string variable_;
  std::string meeting_id_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Transport or provider failure from the completion gateway.
class GatewayError : public Error {
 public:
  GatewayError(const std::string& message, int http_status, bool retryable)
      : Error(message), http_status_(http_status), retryable_(retryable) {}
  explicit GatewayError(const std::string& message)
      : GatewayError(message, 0, true) {}

  // 0 means transport-level failure (no HTTP status).
  int http_status() const { return http_status_; }
  bool retryable() const { return retryable_; }
  int attempts() const { return attempts_; }
  void set_attempts(int n) { attempts_ = n; }

 private:
  int http_status_ = 0;
  bool retryable_ = true;
  int attempts_ = 1;
};

// Scripted backend had no entry for the requested tag.
class FixtureMissError : public GatewayError {
 public:
  explicit FixtureMissError(const std::string& tag)
      : GatewayError("fixture miss: no scripted response for " + tag, 0,
                     false) {}
};

}  // namespace fedsight
