#pragma once

#include <stdexcept>
#include <string>

namespace qcomb {

// Malformed input: bad labels, dimensions, graphs, configs.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical solver did not reach the requested tolerances.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A size guard (dimension cap, search-space cap) was hit.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qcomb
