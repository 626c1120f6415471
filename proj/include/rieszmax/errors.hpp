#pragma once

#include <stdexcept>
#include <string>

namespace rieszmax {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A mass budget cannot fit inside the domain.
struct InfeasibleMassError : Error {
    using Error::Error;
};

/// A requested measure is not a whole number of cells.
struct NotRepresentableError : Error {
    using Error::Error;
};

/// A reflection does not map cell centers to cell centers.
struct ReflectionNotGridCompatibleError : Error {
    using Error::Error;
};

/// A function violates a precondition (cap/mass/symmetry).
struct InfeasibleInputError : Error {
    using Error::Error;
};

/// Enumeration would exceed the configured evaluation budget.
struct BudgetExceededError : Error {
    using Error::Error;
};

/// An integrand lacks a property required by the requested path.
struct IntegrandError : Error {
    using Error::Error;
};

}  // namespace rieszmax
