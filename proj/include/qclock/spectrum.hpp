#pragma once

#include "qclock/units.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qclock {

using BigInt = boost::multiprecision::cpp_int;

/// Default big-integer budget: every r_n and every LCM must stay below 2^256.
inline constexpr unsigned kDefaultCapacityBits = 256;

/// Reduced fraction C/B describing E_n / E_1.
struct RationalRatio {
    BigInt num;  // C >= 0
    BigInt den;  // B >= 1

    bool operator==(const RationalRatio&) const = default;
};

/// Throws invalid-argument unless den >= 1, num >= 0 and gcd(num, den) == 1.
void validate(const RationalRatio& ratio);
std::string to_string(const RationalRatio& ratio);

enum class SpectrumKind { EquallySpaced, Rational, RationalizedApprox };

std::string_view to_string(SpectrumKind kind) noexcept;

/// Diagonal data of a non-degenerate clock Hamiltonian with E_0 = 0.
///
/// Levels are energies (J in SI mode, multiples of hbar = 1 in natural mode).
/// The integers r_n satisfy E_n T / (2 pi hbar) = r_n exactly for the
/// EquallySpaced and Rational kinds. For RationalizedApprox the stored levels
/// are the original (possibly irrational) energies while r_n and T come from
/// the rational approximation, so the relation holds only to within epsilon.
class ClockSpectrum {
public:
    SpectrumKind kind() const noexcept { return kind_; }
    /// Highest level index; the Hilbert space dimension is p + 1.
    std::size_t p() const noexcept { return levels_.size() - 1; }
    std::size_t dimension() const noexcept { return levels_.size(); }
    const std::vector<double>& levels() const noexcept { return levels_; }
    const std::vector<BigInt>& r() const noexcept { return r_; }
    /// Ratios E_n/E_1 for n = 2..p; empty for equally-spaced spectra.
    const std::vector<RationalRatio>& ratios() const noexcept { return ratios_; }
    double period() const noexcept { return period_; }
    double hbar() const noexcept { return hbar_; }
    /// Rationalization tolerance; zero unless kind is RationalizedApprox.
    double epsilon() const noexcept { return epsilon_; }
    /// True when the time-state phases are exactly 2 pi r_n tau / T.
    bool exact() const noexcept { return kind_ != SpectrumKind::RationalizedApprox; }

    bool operator==(const ClockSpectrum&) const = default;

private:
    friend ClockSpectrum build_equally_spaced(int, double, const ConstantsSet&);
    friend ClockSpectrum build_rational(std::span<const RationalRatio>, double,
                                        const ConstantsSet&, unsigned);
    friend ClockSpectrum build_rationalized(std::span<const double>, double,
                                            const ConstantsSet&, unsigned);

    ClockSpectrum() = default;

    SpectrumKind kind_{SpectrumKind::EquallySpaced};
    std::vector<double> levels_;
    std::vector<BigInt> r_;
    std::vector<RationalRatio> ratios_;
    double period_{0.0};
    double hbar_{1.0};
    double epsilon_{0.0};
};

/// E_n = 2 pi hbar n / T, n = 0..p.
ClockSpectrum build_equally_spaced(int p, double period, const ConstantsSet& consts);

/// Spectrum from the exact ratios E_n/E_1 (n = 2..p). r_1 is the LCM of the
/// denominators, r_n = r_1 C_n / B_n and T = 2 pi hbar r_1 / E_1.
ClockSpectrum build_rational(std::span<const RationalRatio> ratios, double e1,
                             const ConstantsSet& consts,
                             unsigned capacity_bits = kDefaultCapacityBits);

struct Rationalization {
    std::vector<RationalRatio> ratios;  // n = 2..p
    double achieved_error{0.0};         // max_n |E_n/E_1 - C_n/B_n|
};

/// For each n >= 2 picks the fraction of smallest denominator within epsilon
/// of E_n/E_1. Candidates are the convergents and semiconvergents of the
/// continued fraction, which contain every best approximation.
Rationalization rationalize(std::span<const double> levels, double epsilon);

/// Same as rationalize on a single real number.
RationalRatio rationalize_value(double x, double epsilon);

/// Rationalized approximation of an arbitrary spectrum. Keeps the original
/// levels; r and T come from the rationalized ratios.
ClockSpectrum build_rationalized(std::span<const double> levels, double epsilon,
                                 const ConstantsSet& consts,
                                 unsigned capacity_bits = kDefaultCapacityBits);

/// r_p, the largest phase integer.
const BigInt& max_integer(const ClockSpectrum& spec);

/// Fractional number of cycles r_n * x mod 1 (in [0, 1)) computed without
/// losing the integer part of r_n.
double fractional_cycles(const BigInt& r, double x);

} // namespace qclock
