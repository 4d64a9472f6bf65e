#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qclock {

enum class ErrorKind {
    InvalidConstants,
    InvalidArgument,
    Capacity,
    IncompatibleState,
    UnsupportedSpectrum,
    SchwarzschildViolation,
    DegenerateClock,
    InvalidDistribution,
    NoEstimate,
    Io,
};

// Stable kebab-case name, used in CLI error output.
std::string_view error_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return error_name(kind_); }

private:
    ErrorKind kind_;
};

} // namespace qclock
