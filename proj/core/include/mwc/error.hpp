#pragma once

#include <stdexcept>
#include <string>

namespace mwc {

/// Raised when an operation's preconditions are not met by its arguments.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for failures that are not attributable to caller input (I/O, numerics).
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mwc
