#pragma once

#include "qclock/clockstates.hpp"

#include <cstdint>
#include <vector>

namespace qclock {

struct OutcomeDistribution {
    std::vector<double> probs;     // P(m), m = 0..z
    std::vector<double> tau_grid;  // tau_m
    double period{0.0};
};

struct MeasurementRecord {
    std::uint64_t seed{0};
    std::int64_t shots{0};
    std::vector<std::int64_t> counts;  // histogram over m
    std::vector<double> tau_grid;
    double period{0.0};
    double estimate{0.0};
    double estimate_error{0.0};
    bool has_estimate{false};
};

/// Born rule P(m) = (p+1)/(z+1) |<tau_m|psi>|^2.
OutcomeDistribution outcome_probabilities(const TimeState& state, const ClockPOVM& povm);

/// Inverse-CDF sampling driven by std::mt19937_64 seeded with `seed`. Each
/// uniform variate is the top 53 bits of one engine output scaled by 2^-53,
/// so records are bit-identical across platforms. The distribution is
/// renormalized when its total lies within 1e-6 of 1 and rejected otherwise.
/// The returned record carries the circular-mean estimate when one exists.
MeasurementRecord sample(const OutcomeDistribution& dist, std::int64_t shots, std::uint64_t seed);

/// Circular mean of the recorded outcomes on the clock dial, in [0, T).
/// Throws no-estimate when the resultant length is below 1e-9.
double estimate_time(const MeasurementRecord& record, double period);

/// Standard error of the circular mean, (T / 2 pi) sqrt(-2 ln Rbar / shots).
double estimate_standard_error(const MeasurementRecord& record, double period);

/// Circular distance between two clock readings.
double circular_distance(double a, double b, double period);

} // namespace qclock
