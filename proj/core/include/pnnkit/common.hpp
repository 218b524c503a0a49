#pragma once

#include <stdexcept>
#include <string>

namespace pnnkit {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: invalid config, malformed arguments, missing files.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// On-disk container problems: wrong magic, truncation, header mismatch.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Runtime numeric failure: non-finite gradients, degenerate batches.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

inline constexpr const char* kArtifactVersion = "pnnkit 0.1.0";

}  // namespace pnnkit
