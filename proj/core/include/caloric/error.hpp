#pragma once

#include <stdexcept>
#include <string>

namespace caloric {

// Every hard failure raised by the library carries the module that raised it,
// so the driver can report "[gauge] ..." style messages and pick exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error("[" + module + "] " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Raised when a numerical invariant (constraint, orthonormality, energy
// monotonicity, ...) is breached. The driver maps these to exit status 1.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace caloric
