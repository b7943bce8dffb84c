#pragma once

#include <stdexcept>
#include <string>

namespace germ {

// Configuration / schema problems (CLI exit code 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated operation preconditions and numeric-budget failures (CLI exit code 2).
struct ModuleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncationBudgetError : ModuleError {
    using ModuleError::ModuleError;
};

struct GridBudgetError : ModuleError {
    using ModuleError::ModuleError;
};

}  // namespace germ
