#pragma once

#include <stdexcept>
#include <string>

namespace rotfactor {

// Exit codes used by the command line tool.
enum class ExitCode : int {
    Success = 0,
    ConfigError = 2,
    InsufficientWindow = 3,
    InvariantFailure = 4,
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad or inconsistent user input (config, rules, point files).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The finite window cannot support the requested computation.
struct WindowTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A postcondition that must hold by construction failed.
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// A difference vector is not a word over the first-return set within budget.
struct NotGenerated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rotfactor
