#pragma once

#include <stdexcept>
#include <string>

namespace lvb {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative solver did not meet its residual tolerance within the cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { StepUnderflow, NonFinite };

  IntegrationError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace lvb
