#ifndef MAGICSIM_ERRORS_HPP_
#define MAGICSIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace magicsim {

// Bad input: a config value or argument violates a documented precondition.
// `field` names the offending entry ("trap.nu_axial", ...) so the CLI can
// report it and exit with the config-error code.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Numerical failure at runtime (root solve did not converge, unstable
// Hessian, singular fit). Maps to the numeric-failure CLI exit code.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace magicsim

#endif  // MAGICSIM_ERRORS_HPP_
