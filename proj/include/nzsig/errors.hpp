#pragma once

#include <stdexcept>
#include <string>

namespace nzsig {

/// Raised when user-supplied parameters violate a model constraint.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a result (singular system,
/// bracketing failure, pathological strategy pair, ...).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nzsig
