#include "qclock/errors.hpp"

namespace qclock {

std::string_view error_name(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidConstants: return "invalid-constants";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::IncompatibleState: return "incompatible-state";
    case ErrorKind::UnsupportedSpectrum: return "unsupported-spectrum";
    case ErrorKind::SchwarzschildViolation: return "schwarzschild-violation";
    case ErrorKind::DegenerateClock: return "degenerate-clock";
    case ErrorKind::InvalidDistribution: return "invalid-distribution";
    case ErrorKind::NoEstimate: return "no-estimate";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace qclock
