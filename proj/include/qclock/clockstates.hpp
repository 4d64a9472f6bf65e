#pragma once

#include "qclock/spectrum.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace qclock {

using Complex = std::complex<double>;
using SpectrumRef = std::shared_ptr<const ClockSpectrum>;

inline SpectrumRef share(ClockSpectrum spec) {
    return std::make_shared<const ClockSpectrum>(std::move(spec));
}

/// Dense assembly is limited to Hilbert spaces of dimension <= 4096.
inline constexpr std::size_t kMaxDenseDimension = 4096;

/// Equal-weight superposition over the energy basis,
/// amplitude_n = exp(-i E_n tau / hbar) / sqrt(p + 1).
struct TimeState {
    Eigen::VectorXcd amplitudes;
    double tau{0.0};
    SpectrumRef spectrum;
};

namespace detail {

// Phases of the grid states tau_m = tau_0 + m T / count. For exact spectra the
// grid part r_n m / count is reduced modulo count in integer arithmetic.
class GridPhases {
public:
    GridPhases(const ClockSpectrum& spec, std::int64_t count, double tau0);
    /// Writes |tau_m> into out (length p + 1).
    void fill(std::int64_t m, Eigen::Ref<Eigen::VectorXcd> out) const;
    std::int64_t count() const noexcept { return count_; }

private:
    const ClockSpectrum* spec_;
    std::int64_t count_;
    double tau0_;
    std::vector<std::int64_t> r_mod_;
    std::vector<double> base_cycles_;
};

} // namespace detail

/// Discrete time POVM {(p+1)/(z+1) |tau_m><tau_m|}, tau_m = tau_0 + m T/(z+1).
class ClockPOVM {
public:
    ClockPOVM(SpectrumRef spectrum, std::int64_t z, double tau0 = 0.0);

    const SpectrumRef& spectrum() const noexcept { return spectrum_; }
    std::int64_t z() const noexcept { return z_; }
    std::int64_t outcomes() const noexcept { return z_ + 1; }
    double tau0() const noexcept { return tau0_; }
    /// Element weight (p+1)/(z+1) as a reduced-free pair {p+1, z+1}.
    std::pair<std::int64_t, std::int64_t> weight_fraction() const noexcept;
    double weight() const noexcept;
    double tau(std::int64_t m) const noexcept;
    /// |tau_m> with the grid phase r_n m / (z+1) reduced in integer arithmetic.
    TimeState state(std::int64_t m) const;
    Eigen::MatrixXcd element(std::int64_t m) const;

private:
    SpectrumRef spectrum_;
    std::int64_t z_;
    double tau0_;
    std::shared_ptr<const detail::GridPhases> grid_;
};

struct TimeOperator {
    Eigen::MatrixXcd matrix;  // energy basis
};

TimeState time_state(const SpectrumRef& spec, double tau);

/// <a|b>; throws incompatible-state when the states belong to different spectra.
Complex overlap(const TimeState& a, const TimeState& b);

/// Phase evolution by dt under the clock Hamiltonian.
TimeState evolve(const TimeState& state, double dt);

/// Energy eigenstate |E_n> carried as a TimeState-shaped vector (tau unused).
TimeState energy_state(const SpectrumRef& spec, std::size_t n);

/// (p+1)/(z+1) sum_m |tau_m><tau_m|, assembled densely with pairwise block
/// summation so the result does not depend on evaluation order.
Eigen::MatrixXcd povm_sum(const ClockPOVM& povm);

/// Gram matrix <tau_m|tau_m'> of the POVM's grid states.
Eigen::MatrixXcd gram_matrix(const ClockPOVM& povm);

/// Largest |eigenvalue| of a Hermitian matrix (its operator 2-norm).
double hermitian_norm(const Eigen::MatrixXcd& m);

/// || (p+1)/(z+1) sum_m |tau_m><tau_m| - 1 ||_2. Requires z >= p.
double identity_residual(const ClockSpectrum& spec, std::int64_t z, double tau0 = 0.0);
double identity_residual(const SpectrumRef& spec, std::int64_t z, double tau0 = 0.0);

/// Periodic-trapezoid approximation of (p+1)/T int |t><t| dt - 1 over
/// [t0, t0 + T]. The integrand's frequencies are the differences r_n - r_k,
/// so the rule is exact once quad_points > r_p; fewer points are rejected.
double continuous_identity_residual(const SpectrumRef& spec, std::int64_t quad_points,
                                    double t0 = 0.0);

/// The same quadrature without the sampling guard; used to exhibit aliasing.
double quadrature_identity_residual(const SpectrumRef& spec, std::int64_t quad_points,
                                    double t0 = 0.0);

/// sum_m tau_m |tau_m><tau_m| over the z = p grid. Equally-spaced spectra only.
TimeOperator hermitian_time_operator(const SpectrumRef& spec, double tau0 = 0.0);

/// Survival amplitude <t0|t0 + delta> of the flat time state.
Complex survival_amplitude(const ClockSpectrum& spec, double delta);

/// First delta > 0 with <t|t + delta> = 0 (to |.| < tol), scanning one period.
/// Empty when the flat state never becomes orthogonal to itself.
std::optional<double> first_orthogonalization_time(const ClockSpectrum& spec, double tol = 1e-9);

} // namespace qclock
