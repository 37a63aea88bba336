#pragma once

#include <stdexcept>
#include <string>

namespace overlap_loop {

/// Process exit codes used by the CLI. Library errors carry the code they
/// map to so batch harnesses can script against stable values.
enum class ExitCode : int {
  ok = 0,
  validation = 1,
  io = 2,
  numeric = 3,
};

class Error : public std::runtime_error {
 public:
  Error(const std::string& msg, ExitCode code)
      : std::runtime_error(msg), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg)
      : Error(msg, ExitCode::validation) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg)
      : Error(msg, ExitCode::validation) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg, ExitCode::io) {}
};

struct MalformedFileError : Error {
  explicit MalformedFileError(const std::string& msg)
      : Error(msg, ExitCode::io) {}
};

struct CalibrationError : Error {
  explicit CalibrationError(const std::string& msg)
      : Error(msg, ExitCode::io) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& msg)
      : Error(msg, ExitCode::numeric) {}
};

struct DegenerateGeometryError : NumericError {
  explicit DegenerateGeometryError(const std::string& msg)
      : NumericError(msg) {}
};

struct InsufficientCorrespondencesError : NumericError {
  explicit InsufficientCorrespondencesError(const std::string& msg)
      : NumericError(msg) {}
};

}  // namespace overlap_loop
