#include "qclock/measurement.hpp"

#include "qclock/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace qclock {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinResultant = 1e-9;

struct Resultant {
    double x{0.0};
    double y{0.0};
    double total{0.0};
};

Resultant resultant(const MeasurementRecord& record, double period) {
    if (record.counts.size() != record.tau_grid.size()) {
        throw Error(ErrorKind::InvalidArgument, "record histogram and grid differ in length");
    }
    Resultant r;
    for (std::size_t m = 0; m < record.counts.size(); ++m) {
        if (record.counts[m] == 0) {
            continue;
        }
        const double w = static_cast<double>(record.counts[m]);
        const double angle = kTwoPi * record.tau_grid[m] / period;
        r.x += w * std::cos(angle);
        r.y += w * std::sin(angle);
        r.total += w;
    }
    if (r.total <= 0.0) {
        throw Error(ErrorKind::NoEstimate, "no counts recorded");
    }
    return r;
}

} // namespace

OutcomeDistribution outcome_probabilities(const TimeState& state, const ClockPOVM& povm) {
    if (!state.spectrum || (state.spectrum != povm.spectrum() && !(*state.spectrum == *povm.spectrum()))) {
        throw Error(ErrorKind::IncompatibleState, "state and POVM belong to different spectra");
    }
    OutcomeDistribution dist;
    dist.period = povm.spectrum()->period();
    const auto outcomes = static_cast<std::size_t>(povm.outcomes());
    dist.probs.resize(outcomes);
    dist.tau_grid.resize(outcomes);
    const double weight = povm.weight();
    for (std::size_t m = 0; m < outcomes; ++m) {
        const auto idx = static_cast<std::int64_t>(m);
        const TimeState grid = povm.state(idx);
        dist.probs[m] = weight * std::norm(grid.amplitudes.dot(state.amplitudes));
        dist.tau_grid[m] = povm.tau(idx);
    }
    return dist;
}

MeasurementRecord sample(const OutcomeDistribution& dist, std::int64_t shots, std::uint64_t seed) {
    if (shots < 1) {
        throw Error(ErrorKind::InvalidArgument, "shots must be >= 1");
    }
    if (dist.probs.empty() || dist.probs.size() != dist.tau_grid.size()) {
        throw Error(ErrorKind::InvalidDistribution, "empty or malformed distribution");
    }
    double total = 0.0;
    for (double p : dist.probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorKind::InvalidDistribution, "probabilities must be finite and >= 0");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw Error(ErrorKind::InvalidDistribution,
                    "probabilities sum to " + std::to_string(total) + ", not 1");
    }
    std::vector<double> cdf(dist.probs.size());
    std::partial_sum(dist.probs.begin(), dist.probs.end(), cdf.begin());
    for (double& c : cdf) {
        c /= total;
    }
    cdf.back() = 1.0;

    MeasurementRecord rec;
    rec.seed = seed;
    rec.shots = shots;
    rec.counts.assign(dist.probs.size(), 0);
    rec.tau_grid = dist.tau_grid;
    rec.period = dist.period;

    std::mt19937_64 engine(seed);
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto m = static_cast<std::size_t>(it - cdf.begin());
        // Zero-probability outcomes are never selected, even at cdf plateaus.
        m = std::min(m, cdf.size() - 1);
        ++rec.counts[m];
    }

    if (rec.period > 0.0) {
        try {
            rec.estimate = estimate_time(rec, rec.period);
            rec.estimate_error = estimate_standard_error(rec, rec.period);
            rec.has_estimate = true;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoEstimate) {
                throw;
            }
        }
    }
    return rec;
}

double estimate_time(const MeasurementRecord& record, double period) {
    if (!(period > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "period must be > 0");
    }
    const Resultant r = resultant(record, period);
    if (std::hypot(r.x, r.y) < kMinResultant * r.total) {
        throw Error(ErrorKind::NoEstimate, "outcomes are balanced around the dial; no mean direction");
    }
    double t = period * std::atan2(r.y, r.x) / kTwoPi;
    if (t < 0.0) {
        t += period;
    }
    return t >= period ? 0.0 : t;
}

double estimate_standard_error(const MeasurementRecord& record, double period) {
    const Resultant r = resultant(record, period);
    const double rbar = std::min(1.0, std::hypot(r.x, r.y) / r.total);
    if (rbar < kMinResultant) {
        throw Error(ErrorKind::NoEstimate, "outcomes are balanced around the dial; no mean direction");
    }
    return period / kTwoPi * std::sqrt(std::max(0.0, -2.0 * std::log(rbar)) / r.total);
}

double circular_distance(double a, double b, double period) {
    double d = std::fmod(std::abs(a - b), period);
    return std::min(d, period - d);
}

} // namespace qclock
