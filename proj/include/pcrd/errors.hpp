#pragma once

#include <stdexcept>

namespace pcrd {

// Error taxonomy maps onto the CLI exit codes: parse/input problems exit 2,
// infeasible budgets and solver failures exit 3, broken internal invariants
// exit 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

struct InfeasibleError : Error {
    using Error::Error;
};

struct SolveError : Error {
    using Error::Error;
};

struct InternalError : Error {
    using Error::Error;
};

}  // namespace pcrd
