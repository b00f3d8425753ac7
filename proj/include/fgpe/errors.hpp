#pragma once

#include <stdexcept>
#include <string>

namespace fgpe {

// config / CLI usage problems -> exit code 2
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// solver breakdowns, non-convergence, numerical instability -> exit code 3
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// detected ground-state nonexistence (unbounded energy descent) -> exit code 4
struct NonexistenceError : std::runtime_error {
    explicit NonexistenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fgpe
