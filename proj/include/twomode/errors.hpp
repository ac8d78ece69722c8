#pragma once

#include <stdexcept>
#include <string>

namespace twomode {

// Iterative solver failed to reach its tolerance. CLI exit code 3.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Two redundant computation paths disagreed beyond tolerance, or an
// algebraically guaranteed property failed numerically. CLI exit code 4.
struct ConsistencyError : std::runtime_error {
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace twomode
