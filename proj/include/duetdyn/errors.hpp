// errors.hpp: exception types shared by the duetdyn library

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace duetdyn {

// Raised when an input violates a documented range or type invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// File read/write failure; the message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class GuardKind { TraceDrift, PositivityViolation, StepUnderflow, NormDrift };

std::string_view to_string(GuardKind kind);

// A physics guard tripped during integration. Carries the simulation time at
// which the violation was detected so callers can report it.
class GuardError : public std::runtime_error {
public:
    GuardError(GuardKind kind, double time, const std::string& detail);

    GuardKind kind() const noexcept { return kind_; }
    double time() const noexcept { return time_; }

private:
    GuardKind kind_;
    double time_;
};

} // namespace duetdyn
