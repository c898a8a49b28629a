#pragma once

#include <stdexcept>
#include <string>

namespace hdsg {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Decree arcs (or order relations) form a cycle.
class CycleError : public Error { using Error::Error; };

/// The design space or a correction request admits no valid configuration.
class InfeasibleError : public Error { using Error::Error; };

/// A name does not resolve to a declared variable, level, or value.
class ReferenceError : public Error { using Error::Error; };

/// Empty or malformed variable domain, or a value outside its domain.
class DomainError : public Error { using Error::Error; };

/// support() called without a value for some ancestor.
class MissingParentError : public Error { using Error::Error; };

/// Point has the wrong number of entries for the design space.
class WidthError : public Error { using Error::Error; };

/// Enumeration would exceed the configured cap.
class BudgetError : public Error { using Error::Error; };

/// Non-finite input where a finite real is required.
class NonFiniteError : public Error { using Error::Error; };

/// Continuous domain without finite bounds.
class UnboundedError : public Error { using Error::Error; };

/// Kernel hyperparameter vector malformed for the chosen kind.
class HyperparamError : public Error { using Error::Error; };

/// spd_check input is not symmetric.
class NonSymmetricError : public Error { using Error::Error; };

/// Factorization failed at the maximum nugget.
class SingularError : public Error { using Error::Error; };

/// All training targets equal; no signal to fit.
class DegenerateError : public Error { using Error::Error; };

/// Randomized search gave up after its trial budget.
class SearchExhaustedError : public Error { using Error::Error; };

/// Problem name not registered.
class UnknownProblemError : public Error { using Error::Error; };

/// Point rejected by is_valid where a valid point is required.
class InvalidPointError : public Error { using Error::Error; };

/// Malformed input file; message carries position or key path.
class ParseError : public Error { using Error::Error; };

} // namespace hdsg
