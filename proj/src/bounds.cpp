#include "qclock/bounds.hpp"

#include "qclock/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace qclock {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRelTol = 1e-12;

void require_positive(double v, const char* what) {
    if (!(std::isfinite(v) && v > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be finite and > 0");
    }
}

} // namespace

ClockBody ClockBody::make(double diameter, double rest_mass, std::optional<double> mass) {
    require_positive(diameter, "clock diameter l_C");
    if (!(std::isfinite(rest_mass) && rest_mass >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "rest mass must be finite and >= 0");
    }
    if (mass) {
        require_positive(*mass, "inertial mass m");
    }
    return {diameter, rest_mass, mass.value_or(rest_mass)};
}

void check_admissible(const ClockBody& body, const ConstantsSet& k) {
    validate(k);
    require_positive(body.diameter, "clock diameter l_C");
    if (!(std::isfinite(body.rest_mass) && body.rest_mass >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "rest mass must be finite and >= 0");
    }
    if (!(std::isfinite(body.mass) && body.mass >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "mass must be finite and >= 0");
    }
    if (!(body.diameter / 2.0 > 2.0 * k.G * body.rest_mass / (k.c * k.c))) {
        throw Error(ErrorKind::SchwarzschildViolation,
                    "half the clock diameter does not exceed the Schwarzschild radius of its rest mass");
    }
}

double confinement_rate(const ClockBody& body, const ConstantsSet& k) {
    check_admissible(body, k);
    const PlanckScale planck = derive_planck_scale(k);
    const double rate =
        body.diameter / (4.0 * planck.length * planck.time) - body.rest_mass * k.c * k.c / k.hbar;
    if (!(rate > 0.0)) {
        throw Error(ErrorKind::SchwarzschildViolation,
                    "no energy spectrum fits inside the clock at this rest mass");
    }
    return rate;
}

double discretization_bound(const ClockBody& body, const ConstantsSet& k, std::int64_t p,
                            std::int64_t z) {
    if (p < 1 || z < p) {
        throw Error(ErrorKind::InvalidArgument, "discretization bound requires 1 <= p <= z");
    }
    const double rate = confinement_rate(body, k);
    return 2.0 * kPi / rate * (static_cast<double>(p + 1) / static_cast<double>(z + 1));
}

double discretization_bound_generic(const ClockBody& body, const ConstantsSet& k,
                                    const BigInt& r_max, std::int64_t z) {
    if (r_max < 1 || z < 0 || !(BigInt(z) + 1 > r_max)) {
        throw Error(ErrorKind::InvalidArgument, "generic discretization bound requires z + 1 > r_p");
    }
    const double rate = confinement_rate(body, k);
    return 2.0 * kPi / rate * (r_max.convert_to<double>() / static_cast<double>(z + 1));
}

double continuum_threshold(const ClockBody& body, const ConstantsSet& k, const BigInt& count) {
    if (count < 1) {
        throw Error(ErrorKind::InvalidArgument, "continuum count must be >= 1");
    }
    return 2.0 * kPi * count.convert_to<double>() / confinement_rate(body, k);
}

bool continuum_condition(const ClockBody& body, const ConstantsSet& k, double period,
                         const BigInt& count) {
    const double threshold = continuum_threshold(body, k, count);
    if (std::isinf(period) && period > 0.0) {
        return true;
    }
    return period > threshold * (1.0 + kRelTol);
}

double structural_bound(double period, std::int64_t p) {
    require_positive(period, "T");
    if (p < 0) {
        throw Error(ErrorKind::InvalidArgument, "p must be >= 0");
    }
    return period / static_cast<double>(p + 1);
}

EnergyMoments energy_moments(std::span<const double> levels) {
    EnergyMoments out;
    if (levels.empty()) {
        return out;
    }
    const auto d = static_cast<double>(levels.size());
    for (double e : levels) {
        out.mean += e;
    }
    out.mean /= d;
    double var = 0.0;
    for (double e : levels) {
        var += (e - out.mean) * (e - out.mean);
    }
    out.spread = std::sqrt(var / d);
    return out;
}

double speed_limit_bound(std::span<const double> levels, double hbar) {
    if (levels.size() < 2) {
        throw Error(ErrorKind::DegenerateClock, "a single-level clock never evolves to an orthogonal state");
    }
    const EnergyMoments mom = energy_moments(levels);
    if (!(mom.spread > 0.0) || !(mom.mean > 0.0)) {
        throw Error(ErrorKind::DegenerateClock, "energy spread vanishes");
    }
    return std::max(kPi * hbar / (2.0 * mom.mean), kPi * hbar / (2.0 * mom.spread));
}

double speed_limit_bound(const ClockSpectrum& spec) {
    return speed_limit_bound(spec.levels(), spec.hbar());
}

double speed_limit_gravitational_floor(const ClockBody& body, const ConstantsSet& k) {
    return kPi / confinement_rate(body, k);
}

SpreadingBound spreading_bound(double mass, double theta, const ConstantsSet& k) {
    validate(k);
    require_positive(mass, "mass");
    require_positive(theta, "operational time theta");
    SpreadingBound out;
    out.delta_x_opt = std::sqrt(k.hbar * theta / (2.0 * mass));
    out.dt = out.delta_x_opt / k.c;
    out.delta_v = k.hbar / (2.0 * mass * out.delta_x_opt);
    return out;
}

double gravitational_mass_limit(double theta, const ConstantsSet& k) {
    validate(k);
    require_positive(theta, "operational time theta");
    // (c^4 hbar theta / 32 G^2)^(1/3), grouped to avoid forming c^4 / G^2.
    const double a = k.c * k.c / k.G;
    return std::cbrt(a * a * k.hbar * theta / 32.0);
}

double fundamental_resolution(double theta, const ConstantsSet& k) {
    require_positive(theta, "operational time theta");
    const double tp = derive_planck_scale(k).time;
    if (theta < 4.0 * tp) {
        return optimize_mass(theta, k, true).dt_min;
    }
    return std::cbrt(2.0 * theta) * std::cbrt(tp * tp);
}

std::string_view to_string(MassRegime regime) noexcept {
    return regime == MassRegime::SpreadingGravitational ? "spreading_grav" : "compton_grav_floor";
}

MassOptimum optimize_mass(double theta, const ConstantsSet& k, bool include_compton) {
    validate(k);
    require_positive(theta, "operational time theta");

    // Each limit as log(dt) against u = log(m).
    const double log_spread0 = 0.5 * std::log(k.hbar * theta / 2.0) - std::log(k.c);
    const double log_compton0 = std::log(k.hbar) - 2.0 * std::log(k.c);
    const double log_grav0 = std::log(4.0 * k.G) - 3.0 * std::log(k.c);
    auto spread = [&](double u) { return log_spread0 - 0.5 * u; };
    auto compton = [&](double u) { return log_compton0 - u; };
    auto grav = [&](double u) { return log_grav0 + u; };
    auto decreasing = [&](double u) {
        return include_compton ? std::max(spread(u), compton(u)) : spread(u);
    };
    auto objective = [&](double u) { return std::max(decreasing(u), grav(u)); };

    // Analytic crossings bracket the optimum.
    const double u_sg = (log_spread0 - log_grav0) / 1.5;
    const double u_cg = (log_compton0 - log_grav0) / 2.0;
    double lo = std::min(u_sg, u_cg) - 2.0;
    double hi = std::max(u_sg, u_cg) + 2.0;

    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < 120; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = objective(x2);
        }
    }
    double u = 0.5 * (lo + hi);

    // Polish: the optimum is where the active decreasing limit meets gravity.
    const bool compton_active = include_compton && compton(u) > spread(u);
    auto gap = [&](double v) { return (compton_active ? compton(v) : spread(v)) - grav(v); };
    double a = u - 1.0;
    double b = u + 1.0;
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) {
            break;
        }
        (gap(mid) > 0.0 ? a : b) = mid;
    }
    u = 0.5 * (a + b);

    MassOptimum out;
    out.mass = std::exp(u);
    out.dt_min = std::exp(objective(u));
    out.regime = compton_active ? MassRegime::ComptonGravitational : MassRegime::SpreadingGravitational;
    return out;
}

std::string_view to_string(BoundTag tag) noexcept {
    switch (tag) {
    case BoundTag::Structural: return "structural";
    case BoundTag::SpeedLimit: return "speed_limit";
    case BoundTag::Spreading: return "spreading";
    case BoundTag::Fundamental: return "fundamental";
    }
    return "unknown";
}

BoundReport bound_report(const ClockBody& body, const ConstantsSet& k, const ClockSpectrum& spec,
                         std::int64_t z, std::optional<double> theta) {
    check_admissible(body, k);
    const double period = spec.period();
    const double th = theta.value_or(period);
    require_positive(th, "operational time theta");
    if (th > period * (1.0 + kRelTol)) {
        throw Error(ErrorKind::InvalidArgument, "operational time theta must not exceed T");
    }
    const auto p = static_cast<std::int64_t>(spec.p());
    if (z < p) {
        throw Error(ErrorKind::InvalidArgument, "z must be >= p");
    }

    BoundReport rep;
    rep.theta = th;
    rep.delta_tau = period / static_cast<double>(z + 1);
    if (spec.kind() == SpectrumKind::EquallySpaced) {
        rep.delta_tau_min = discretization_bound(body, k, p, z);
        rep.continuum = continuum_condition(body, k, period, BigInt(p + 1));
    } else {
        rep.delta_tau_min = discretization_bound_generic(body, k, max_integer(spec), z);
        rep.continuum = continuum_condition(body, k, period, max_integer(spec));
    }
    rep.structural_dt = structural_bound(period, p);
    rep.speed_limit_dt = speed_limit_bound(spec);
    rep.speed_limit_floor = speed_limit_gravitational_floor(body, k);
    const SpreadingBound spread = spreading_bound(body.mass, th, k);
    rep.spreading_dt = spread.dt;
    rep.delta_x_opt = spread.delta_x_opt;
    rep.delta_v = spread.delta_v;
    rep.mass_limit = gravitational_mass_limit(th, k);
    rep.fundamental_dt = fundamental_resolution(th, k);
    rep.optimal_mass = optimize_mass(th, k, true).mass;

    const std::array<std::pair<BoundTag, double>, 4> candidates{{
        {BoundTag::Structural, rep.structural_dt},
        {BoundTag::SpeedLimit, rep.speed_limit_dt},
        {BoundTag::Spreading, rep.spreading_dt},
        {BoundTag::Fundamental, rep.fundamental_dt},
    }};
    auto best = candidates.front();
    for (const auto& c : candidates) {
        if (c.second > best.second) {
            best = c;
        }
    }
    rep.binding = best.first;
    return rep;
}

} // namespace qclock
