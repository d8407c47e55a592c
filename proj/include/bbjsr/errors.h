#pragma once

#include <stdexcept>
#include <string>

namespace bbjsr {

/// Bad input to a library call: out-of-domain arguments, dimension
/// mismatches, malformed files, too-small samples. The CLI maps these to
/// exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SampleTooSmall : public ValidationError {
 public:
  SampleTooSmall(std::size_t have, std::size_t need)
      : ValidationError("sample too small: N = " + std::to_string(have) +
                        " but at least N = " + std::to_string(need) +
                        " traces are required"),
        have_(have),
        need_(need) {}

  std::size_t have() const { return have_; }
  std::size_t need() const { return need_; }

 private:
  std::size_t have_;
  std::size_t need_;
};

class BudgetExceeded : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bbjsr
