#pragma once

#include <stdexcept>
#include <string>

namespace subcol {

// Bad arguments, inconsistent dimensions, invalid configuration.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Iteration caps exceeded, factorization breakdowns, non-finite values.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// File problems. `kind` distinguishes the failure modes callers test for.
class IoError : public std::runtime_error {
 public:
  enum class Kind { OpenFailed, BadHeader, CountMismatch, BadToken };

  IoError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace subcol
