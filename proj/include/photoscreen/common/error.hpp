#pragma once

#include <stdexcept>
#include <string>

namespace photoscreen {

// Error taxonomy mirrors the CLI exit codes: validation problems exit 1,
// missing resources exit 2, convergence/diagnostic failures exit 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

class MissingResourceError : public Error {
 public:
  explicit MissingResourceError(const std::string& what) : Error(what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(what) {}
};

// Image decode failures; batch drivers catch these per photo.
class DecodeError : public Error {
 public:
  explicit DecodeError(const std::string& what) : Error(what) {}
};

class UnsupportedFormatError : public DecodeError {
 public:
  explicit UnsupportedFormatError(const std::string& what) : DecodeError(what) {}
};

}  // namespace photoscreen
