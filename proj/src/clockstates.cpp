#include "qclock/clockstates.hpp"

#include "qclock/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qclock {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

__extension__ typedef unsigned __int128 uint128;

// (a * b) mod n for 0 <= a, b < n.
std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t n) {
    return static_cast<std::int64_t>(static_cast<uint128>(a) * static_cast<uint128>(b) %
                                     static_cast<uint128>(n));
}

double wrap_unit(double c) {
    c -= std::floor(c);
    return c >= 1.0 ? 0.0 : c;
}

// Cycles completed by level n after time tau, modulo 1.
double cycles(const ClockSpectrum& s, std::size_t n, double tau) {
    if (s.exact()) {
        return fractional_cycles(s.r()[n], tau / s.period());
    }
    return wrap_unit(s.levels()[n] * tau / (kTwoPi * s.hbar()));
}

Complex unit_phase(double cyc, double scale) {
    return std::polar(scale, -kTwoPi * cyc);
}

void check_dense(const ClockSpectrum& s) {
    if (s.dimension() > kMaxDenseDimension) {
        throw Error(ErrorKind::Capacity, "dimension " + std::to_string(s.dimension()) +
                                             " exceeds the dense-assembly cap of " +
                                             std::to_string(kMaxDenseDimension));
    }
}

// Pairwise sum of A A^dagger over column blocks [begin, end).
Eigen::MatrixXcd frame_sum(const detail::GridPhases& grid, Eigen::Index dim, std::int64_t begin,
                           std::int64_t end) {
    constexpr std::int64_t kLeaf = 64;
    if (end - begin <= kLeaf) {
        Eigen::MatrixXcd block(dim, end - begin);
        for (std::int64_t m = begin; m < end; ++m) {
            grid.fill(m, block.col(m - begin));
        }
        return block * block.adjoint();
    }
    const std::int64_t mid = begin + (end - begin) / 2;
    Eigen::MatrixXcd left = frame_sum(grid, dim, begin, mid);
    left += frame_sum(grid, dim, mid, end);
    return left;
}

double residual_from_grid(const ClockSpectrum& s, std::int64_t count, double tau0) {
    check_dense(s);
    const detail::GridPhases grid(s, count, tau0);
    const auto dim = static_cast<Eigen::Index>(s.dimension());
    Eigen::MatrixXcd sum = frame_sum(grid, dim, 0, count);
    sum *= static_cast<double>(dim) / static_cast<double>(count);
    sum -= Eigen::MatrixXcd::Identity(dim, dim);
    return hermitian_norm(sum);
}

} // namespace

namespace detail {

GridPhases::GridPhases(const ClockSpectrum& spec, std::int64_t count, double tau0)
    : spec_(&spec), count_(count), tau0_(tau0) {
    if (count < 1) {
        throw Error(ErrorKind::InvalidArgument, "grid needs at least one point");
    }
    if (spec.exact()) {
        r_mod_.reserve(spec.dimension());
        base_cycles_.reserve(spec.dimension());
        const double x0 = tau0 / spec.period();
        for (const auto& r : spec.r()) {
            r_mod_.push_back(static_cast<std::int64_t>(r % count));
            base_cycles_.push_back(fractional_cycles(r, x0));
        }
    }
}

void GridPhases::fill(std::int64_t m, Eigen::Ref<Eigen::VectorXcd> out) const {
    const auto& s = *spec_;
    const double scale = 1.0 / std::sqrt(static_cast<double>(s.dimension()));
    if (s.exact()) {
        const std::int64_t mm = ((m % count_) + count_) % count_;
        for (std::size_t n = 0; n < s.dimension(); ++n) {
            const std::int64_t grid = mulmod(r_mod_[n], mm, count_);
            const double cyc =
                wrap_unit(base_cycles_[n] + static_cast<double>(grid) / static_cast<double>(count_));
            out[static_cast<Eigen::Index>(n)] = unit_phase(cyc, scale);
        }
        return;
    }
    const double tau = tau0_ + static_cast<double>(m) * s.period() / static_cast<double>(count_);
    for (std::size_t n = 0; n < s.dimension(); ++n) {
        out[static_cast<Eigen::Index>(n)] = unit_phase(cycles(s, n, tau), scale);
    }
}

} // namespace detail

ClockPOVM::ClockPOVM(SpectrumRef spectrum, std::int64_t z, double tau0)
    : spectrum_(std::move(spectrum)), z_(z), tau0_(tau0) {
    if (!spectrum_) {
        throw Error(ErrorKind::InvalidArgument, "POVM needs a spectrum");
    }
    if (z < 0 || static_cast<std::size_t>(z) < spectrum_->p()) {
        throw Error(ErrorKind::InvalidArgument, "POVM requires z >= p");
    }
    if (z == std::numeric_limits<std::int64_t>::max()) {
        throw Error(ErrorKind::InvalidArgument, "z too large");
    }
    if (!std::isfinite(tau0)) {
        throw Error(ErrorKind::InvalidArgument, "tau_0 must be finite");
    }
    grid_ = std::make_shared<const detail::GridPhases>(*spectrum_, z + 1, tau0);
}

std::pair<std::int64_t, std::int64_t> ClockPOVM::weight_fraction() const noexcept {
    return {static_cast<std::int64_t>(spectrum_->dimension()), z_ + 1};
}

double ClockPOVM::weight() const noexcept {
    return static_cast<double>(spectrum_->dimension()) / static_cast<double>(z_ + 1);
}

double ClockPOVM::tau(std::int64_t m) const noexcept {
    return tau0_ + static_cast<double>(m) * spectrum_->period() / static_cast<double>(z_ + 1);
}

TimeState ClockPOVM::state(std::int64_t m) const {
    TimeState st{Eigen::VectorXcd(static_cast<Eigen::Index>(spectrum_->dimension())), tau(m),
                 spectrum_};
    grid_->fill(m, st.amplitudes);
    return st;
}

Eigen::MatrixXcd ClockPOVM::element(std::int64_t m) const {
    const TimeState st = state(m);
    return weight() * (st.amplitudes * st.amplitudes.adjoint());
}

TimeState time_state(const SpectrumRef& spec, double tau) {
    if (!spec) {
        throw Error(ErrorKind::InvalidArgument, "time state needs a spectrum");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec->dimension()));
    TimeState st{Eigen::VectorXcd(static_cast<Eigen::Index>(spec->dimension())), tau, spec};
    for (std::size_t n = 0; n < spec->dimension(); ++n) {
        st.amplitudes[static_cast<Eigen::Index>(n)] = unit_phase(cycles(*spec, n, tau), scale);
    }
    return st;
}

Complex overlap(const TimeState& a, const TimeState& b) {
    if (!a.spectrum || !b.spectrum ||
        (a.spectrum != b.spectrum && !(*a.spectrum == *b.spectrum))) {
        throw Error(ErrorKind::IncompatibleState, "states belong to different spectra");
    }
    return a.amplitudes.dot(b.amplitudes);  // conjugates the left operand
}

TimeState evolve(const TimeState& state, double dt) {
    TimeState out = state;
    const auto& s = *state.spectrum;
    for (std::size_t n = 0; n < s.dimension(); ++n) {
        out.amplitudes[static_cast<Eigen::Index>(n)] *= unit_phase(cycles(s, n, dt), 1.0);
    }
    out.tau = state.tau + dt;
    return out;
}

TimeState energy_state(const SpectrumRef& spec, std::size_t n) {
    if (!spec || n >= spec->dimension()) {
        throw Error(ErrorKind::InvalidArgument, "energy index out of range");
    }
    TimeState st{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(spec->dimension())), 0.0, spec};
    st.amplitudes[static_cast<Eigen::Index>(n)] = 1.0;
    return st;
}

Eigen::MatrixXcd povm_sum(const ClockPOVM& povm) {
    const auto& s = *povm.spectrum();
    check_dense(s);
    const detail::GridPhases grid(s, povm.outcomes(), povm.tau0());
    Eigen::MatrixXcd sum =
        frame_sum(grid, static_cast<Eigen::Index>(s.dimension()), 0, povm.outcomes());
    return povm.weight() * sum;
}

Eigen::MatrixXcd gram_matrix(const ClockPOVM& povm) {
    const auto& s = *povm.spectrum();
    check_dense(s);
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(s.dimension()), povm.outcomes());
    const detail::GridPhases grid(s, povm.outcomes(), povm.tau0());
    for (std::int64_t m = 0; m < povm.outcomes(); ++m) {
        grid.fill(m, a.col(m));
    }
    return a.adjoint() * a;
}

double hermitian_norm(const Eigen::MatrixXcd& m) {
    const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::InvalidArgument, "eigenvalue computation failed");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double identity_residual(const ClockSpectrum& spec, std::int64_t z, double tau0) {
    if (z < 0 || static_cast<std::size_t>(z) < spec.p()) {
        throw Error(ErrorKind::InvalidArgument, "identity residual requires z >= p");
    }
    return residual_from_grid(spec, z + 1, tau0);
}

double identity_residual(const SpectrumRef& spec, std::int64_t z, double tau0) {
    return identity_residual(*spec, z, tau0);
}

double continuous_identity_residual(const SpectrumRef& spec, std::int64_t quad_points, double t0) {
    if (BigInt(quad_points) < max_integer(*spec) + 1) {
        throw Error(ErrorKind::InvalidArgument,
                    "quadrature needs more than r_p = " + max_integer(*spec).str() + " points");
    }
    return residual_from_grid(*spec, quad_points, t0);
}

double quadrature_identity_residual(const SpectrumRef& spec, std::int64_t quad_points, double t0) {
    if (quad_points < 1) {
        throw Error(ErrorKind::InvalidArgument, "quadrature needs at least one point");
    }
    return residual_from_grid(*spec, quad_points, t0);
}

TimeOperator hermitian_time_operator(const SpectrumRef& spec, double tau0) {
    if (spec->kind() != SpectrumKind::EquallySpaced) {
        throw Error(ErrorKind::UnsupportedSpectrum,
                    "a Hermitian time operator exists only for equally-spaced spectra");
    }
    check_dense(*spec);
    const ClockPOVM povm(spec, static_cast<std::int64_t>(spec->p()), tau0);
    const auto dim = static_cast<Eigen::Index>(spec->dimension());
    Eigen::MatrixXcd a(dim, dim);
    Eigen::VectorXd taus(dim);
    const detail::GridPhases grid(*spec, dim, tau0);
    for (Eigen::Index m = 0; m < dim; ++m) {
        grid.fill(m, a.col(m));
        taus[m] = povm.tau(m);
    }
    return {a * taus.asDiagonal() * a.adjoint()};
}

Complex survival_amplitude(const ClockSpectrum& spec, double delta) {
    Complex sum = 0.0;
    for (std::size_t n = 0; n < spec.dimension(); ++n) {
        sum += unit_phase(cycles(spec, n, delta), 1.0);
    }
    return sum / static_cast<double>(spec.dimension());
}

std::optional<double> first_orthogonalization_time(const ClockSpectrum& spec, double tol) {
    const double period = spec.period();
    const double top = max_integer(spec).convert_to<double>();
    constexpr double kSamplesPerCycle = 32.0;
    constexpr double kMaxSamples = double(1 << 26);
    const double samples_per_period = kSamplesPerCycle * (top + 1.0);
    if (samples_per_period > kMaxSamples) {
        throw Error(ErrorKind::Capacity, "spectrum too wide for the orthogonality scan");
    }
    const double h = period / samples_per_period;
    // |<t|t+d>| is symmetric about T/2 when the spectrum is exactly periodic.
    const double span = (spec.exact() ? 0.5 * period : period) + 2.0 * h;
    const auto count = static_cast<std::int64_t>(std::ceil(span / h));
    auto magnitude = [&](double d) { return std::abs(survival_amplitude(spec, d)); };

    // Near a zero the sampled magnitude is at most |f'| h / 2 <= pi / 32.
    constexpr double kCandidate = 0.15;
    double prev2 = magnitude(0.0);
    double prev1 = magnitude(h);
    for (std::int64_t i = 2; i <= count; ++i) {
        const double cur = magnitude(static_cast<double>(i) * h);
        if (prev1 <= prev2 && prev1 <= cur && prev1 < kCandidate) {
            double lo = static_cast<double>(i - 2) * h;
            double hi = static_cast<double>(i) * h;
            // Golden-section search; |f| is V-shaped at a true zero.
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = hi - g * (hi - lo);
            double x2 = lo + g * (hi - lo);
            double f1 = magnitude(x1);
            double f2 = magnitude(x2);
            for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
                 ++it) {
                if (f1 <= f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - g * (hi - lo);
                    f1 = magnitude(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + g * (hi - lo);
                    f2 = magnitude(x2);
                }
            }
            const double best = f1 <= f2 ? x1 : x2;
            if (std::min(f1, f2) < tol && best > 0.0) {
                return best;
            }
        }
        prev2 = prev1;
        prev1 = cur;
    }
    return std::nullopt;
}

} // namespace qclock
