#pragma once

#include <stdexcept>
#include <string>

namespace nheat {

/// Precondition or shape violation by the caller (grid mismatch, bad index, bad argument).
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Explicit scheme requested with a time step outside the stability region.
struct CflError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A non-finite value appeared while stepping.
struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Steady solve requested for data violating the flux/source balance.
struct IncompatibleProblemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quadrature or series truncation could not reach the requested tolerance.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ContractError(what);
}

}  // namespace nheat
