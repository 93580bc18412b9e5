#ifndef QFDIV_ERRORS_HPP
#define QFDIV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qfdiv {

/// Input outside the mathematical domain of an operation (bad dimensions,
/// non-Hermitian matrix, negative probability, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Input is well formed but violates a mathematical hypothesis the operation
/// relies on (e.g. a divergence function that is not operator convex).
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Iterative solver failed on every start.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qfdiv

#endif  // QFDIV_ERRORS_HPP
