#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace displab {

/// Rejected input: malformed configuration, inadmissible profile, bad flag values.
/// CLI maps this family to exit code 2.
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Evaluation requested outside the domain where a quantity is defined
/// (branch cuts, inverse-function domains, vacuum states).  Exit code 2.
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// A solver or quadrature failed to reach its tolerance.  Exit code 3.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The characteristic equation has several admissible roots; the solution is
/// no longer single-valued at the requested point.  Carries every root found.
struct multivalued_error : numerical_error {
  multivalued_error(const std::string& what, std::vector<double> roots_)
      : numerical_error(what), roots(std::move(roots_)) {}
  std::vector<double> roots;
};

/// The datum violates a genericity assumption (vanishing curvature constant).
struct genericity_error : validation_error {
  using validation_error::validation_error;
};

/// A differential polynomial is not a total x-derivative.
struct not_exact_error : validation_error {
  using validation_error::validation_error;
};

}  // namespace displab
