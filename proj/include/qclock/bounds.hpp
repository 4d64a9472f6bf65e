#pragma once

#include "qclock/spectrum.hpp"
#include "qclock/units.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace qclock {

/// Physical body of the clock. `mass` is the inertial mass used by the
/// spreading argument and defaults to the rest mass.
struct ClockBody {
    double diameter{0.0};   // l_C (m)
    double rest_mass{0.0};  // m_rest (kg), internal energy excluded
    double mass{0.0};       // m (kg)

    static ClockBody make(double diameter, double rest_mass, std::optional<double> mass = {});
};

/// Throws schwarzschild-violation unless l_C / 2 > 2 G m_rest / c^2, and
/// invalid-argument for non-positive sizes or masses.
void check_admissible(const ClockBody& body, const ConstantsSet& consts);

/// l_C / (4 l_p t_p) - m_rest c^2 / hbar, the largest spectral width (as an
/// angular frequency) that fits inside the body. Positive for admissible bodies.
double confinement_rate(const ClockBody& body, const ConstantsSet& consts);

/// Lower bound on the spacing T/(z+1) of an equally-spaced clock:
/// 2 pi / rate * (p+1)/(z+1).
double discretization_bound(const ClockBody& body, const ConstantsSet& consts, std::int64_t p,
                            std::int64_t z);

/// Generic-spectrum version, 2 pi / rate * r_p / (z+1); requires z + 1 > r_p.
double discretization_bound_generic(const ClockBody& body, const ConstantsSet& consts,
                                    const BigInt& r_max, std::int64_t z);

/// Period above which the spacing stays above its bound for every z:
/// 2 pi count / rate, with count = p + 1 (equal spacing) or r_p (generic).
double continuum_threshold(const ClockBody& body, const ConstantsSet& consts, const BigInt& count);

/// True iff T exceeds continuum_threshold by more than 1e-12 relative.
bool continuum_condition(const ClockBody& body, const ConstantsSet& consts, double period,
                         const BigInt& count);

/// T / (p + 1).
double structural_bound(double period, std::int64_t p);

struct EnergyMoments {
    double mean{0.0};
    double spread{0.0};
};

/// Mean and standard deviation of H in the flat time state.
EnergyMoments energy_moments(std::span<const double> levels);

/// max(pi hbar / (2 Ebar), pi hbar / (2 dE)) for the flat time state.
double speed_limit_bound(const ClockSpectrum& spec);
double speed_limit_bound(std::span<const double> levels, double hbar);

/// pi / rate: the speed limit once Ebar, 2 dE <= E_p and the body confines E_p.
double speed_limit_gravitational_floor(const ClockBody& body, const ConstantsSet& consts);

struct SpreadingBound {
    double delta_x_opt{0.0};  // sqrt(hbar theta / 2m)
    double dt{0.0};           // delta_x_opt / c
    double delta_v{0.0};      // hbar / (2 m delta_x_opt)
};

SpreadingBound spreading_bound(double mass, double theta, const ConstantsSet& consts);

/// Largest mass whose doubled Schwarzschild radius stays inside the optimal
/// spread: (c^4 hbar theta / 32 G^2)^(1/3).
double gravitational_mass_limit(double theta, const ConstantsSet& consts);

/// 2^(1/3) theta^(1/3) t_p^(2/3) for theta >= 4 t_p; below that the mass
/// optimizer's Compton/gravitational floor.
double fundamental_resolution(double theta, const ConstantsSet& consts);

enum class MassRegime { SpreadingGravitational, ComptonGravitational };

std::string_view to_string(MassRegime regime) noexcept;

struct MassOptimum {
    double mass{0.0};
    double dt_min{0.0};
    MassRegime regime{MassRegime::SpreadingGravitational};
};

/// Minimizes over m the largest of the spreading (sqrt(hbar theta/2m)/c),
/// Compton (hbar/mc^2, optional) and gravitational (4Gm/c^3) lower limits on
/// the resolution. Golden-section search over log m inside a bracket built from
/// the analytic pairwise intersections, then bisection on the active crossing.
MassOptimum optimize_mass(double theta, const ConstantsSet& consts, bool include_compton);

enum class BoundTag { Structural, SpeedLimit, Spreading, Fundamental };

std::string_view to_string(BoundTag tag) noexcept;

struct BoundReport {
    double delta_tau{0.0};            // actual grid spacing T/(z+1)
    double delta_tau_min{0.0};        // discretization bound
    bool continuum{false};
    double structural_dt{0.0};
    double speed_limit_dt{0.0};
    double speed_limit_floor{0.0};
    double spreading_dt{0.0};
    double delta_x_opt{0.0};
    double delta_v{0.0};
    double mass_limit{0.0};
    double fundamental_dt{0.0};
    double optimal_mass{0.0};
    double theta{0.0};
    BoundTag binding{BoundTag::Structural};
};

/// Evaluates every limit for the clock. theta defaults to T and must satisfy
/// 0 < theta <= T. `binding` is the largest of the structural, speed-limit,
/// spreading (at body.mass) and fundamental bounds; ties go to the earlier one.
BoundReport bound_report(const ClockBody& body, const ConstantsSet& consts,
                         const ClockSpectrum& spec, std::int64_t z,
                         std::optional<double> theta = {});

} // namespace qclock
