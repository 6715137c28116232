#pragma once

#include <stdexcept>
#include <string>

namespace carbonfund {

// Invalid or inconsistent configuration input. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical routine could not produce a trustworthy result. CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The backward ODE grid failed its step-halving accuracy check.
struct StepTooCoarse : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace carbonfund
