#include "qclock/bounds.hpp"
#include "qclock/clockstates.hpp"
#include "qclock/measurement.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace qclock;
using namespace qclock::testing;

namespace {

const ConstantsSet kNat = ConstantsSet::natural();
const ConstantsSet kSI = ConstantsSet::codata2018();

struct Outcome {
    bool pass{true};
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_s > 0.0 && secs >= limit_s) {
        out.pass = false;
        out.detail += " [runtime limit " + std::to_string(limit_s) + " s exceeded]";
    }
    failures += out.pass ? 0 : 1;
    std::printf("criterion %d: %s  %s (%s; %.2f s)\n", id, out.pass ? "PASS" : "FAIL", title,
                out.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<ClockSpectrum> random_spectra(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::vector<ClockSpectrum> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(random_rational_spectrum(rng, 6, 9));
    }
    return out;
}

std::int64_t rp_of(const ClockSpectrum& s) {
    return max_integer(s).convert_to<std::int64_t>();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main() {
    criterion(1, "grid time states are orthonormal at z = p", 5.0, [] {
        double worst = 0.0;
        for (int p : {1, 2, 7, 31, 255}) {
            const SpectrumRef s = share(build_equally_spaced(p, 1.0, kNat));
            const Eigen::MatrixXcd g = gram_matrix(ClockPOVM(s, p, 0.0));
            const auto d = static_cast<Eigen::Index>(p + 1);
            worst = std::max(worst, (g - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff());
        }
        return Outcome{worst < 1e-12, "max |G - 1| = " + fmt("%.3g", worst)};
    });

    criterion(2, "POVM completeness for rational spectra", 30.0, [] {
        std::mt19937_64 rng(2024);
        double worst = 0.0;
        for (const ClockSpectrum& s : random_spectra(11, 200)) {
            const double tau0 = std::uniform_real_distribution<double>(0.0, s.period())(rng);
            worst = std::max(worst, identity_residual(s, rp_of(s), tau0));
        }
        double least = INFINITY;
        for (int i = 0; i < 20; ++i) {
            const auto [s, z] = aliased_counterexample(rng);
            least = std::min(least, identity_residual(s, z, 0.1 * i));
        }
        return Outcome{worst < 1e-12 && least > 0.1, "max residual (z+1 = r_p+1) = " + fmt("%.3g", worst) +
                                                         ", min counterexample residual = " + fmt("%.3g", least)};
    });

    criterion(3, "continuous-limit completeness and aliasing", 0.0, [] {
        double worst = 0.0;
        double witness = 0.0;
        for (const ClockSpectrum& s : random_spectra(11, 200)) {
            const SpectrumRef ref = share(s);
            const std::int64_t rp = rp_of(s);
            worst = std::max(worst, continuous_identity_residual(ref, 2 * (rp + 1)));
            worst = std::max(worst, continuous_identity_residual(ref, rp + 1));
            witness = std::max(witness, quadrature_identity_residual(ref, rp));
        }
        return Outcome{worst < 1e-12 && witness > 1e-3,
                       "max residual for N >= r_p+1 = " + fmt("%.3g", worst) +
                           ", largest residual at N = r_p = " + fmt("%.3g", witness)};
    });

    criterion(4, "shift covariance and cyclicity", 0.0, [] {
        std::mt19937_64 rng(4);
        double worst = 0.0;
        for (const ClockSpectrum& s0 : random_spectra(44, 100)) {
            const SpectrumRef s = share(s0);
            const std::int64_t z = rp_of(s0) + std::int64_t(rng() % 5);
            const double tau0 = std::uniform_real_distribution<double>(-s->period(), s->period())(rng);
            const ClockPOVM povm(s, z, tau0);
            for (std::int64_t m = 0; m <= z; ++m) {
                const TimeState st = povm.state(m);
                const Eigen::VectorXcd next = evolve(st, s->period() / double(z + 1)).amplitudes;
                worst = std::max(worst, (next - povm.state(m + 1).amplitudes).cwiseAbs().maxCoeff());
                worst = std::max(worst, (evolve(st, s->period()).amplitudes - st.amplitudes).cwiseAbs().maxCoeff());
            }
        }
        return Outcome{worst < 1e-12, "max componentwise deviation = " + fmt("%.3g", worst)};
    });

    criterion(5, "speed-limit validity and equal-spacing tightness", 0.0, [] {
        double slack = INFINITY;
        int orthogonal = 0;
        for (const ClockSpectrum& s : random_spectra(55, 200)) {
            if (const auto t = first_orthogonalization_time(s)) {
                ++orthogonal;
                slack = std::min(slack, *t - speed_limit_bound(s));
            }
        }
        double tight = 0.0;
        for (int p = 1; p <= 20; ++p) {
            const ClockSpectrum s = build_equally_spaced(p, 2.5, kNat);
            const auto t = first_orthogonalization_time(s);
            tight = std::max(tight, t ? std::abs(*t - structural_bound(2.5, p)) : INFINITY);
        }
        return Outcome{slack >= -1e-12 && tight < 1e-10,
                       "min(t_orth - bound) = " + fmt("%.3g", slack) + " over " + std::to_string(orthogonal) +
                           " spectra that orthogonalize, max |t_orth - T/(p+1)| = " + fmt("%.3g", tight)};
    });

    criterion(6, "fundamental resolution and mass optimization", 0.0, [] {
        const double pinned = 1.798054239999272e-29;
        const double fr = fundamental_resolution(1.0, kSI);
        const double rel_pin = std::abs(fr - pinned) / pinned;
        const double tp = derive_planck_scale(kSI).time;
        double rel_opt = 0.0;
        for (double k : {10.0, 1e3, 1e6}) {
            for (bool compton : {true, false}) {
                const double a = optimize_mass(k * tp, kSI, compton).dt_min;
                const double b = fundamental_resolution(k * tp, kSI);
                rel_opt = std::max(rel_opt, std::abs(a - b) / b);
            }
        }
        const double rel_floor = std::abs(optimize_mass(4.0 * tp, kSI, true).dt_min - 2.0 * tp) / (2.0 * tp);
        return Outcome{rel_pin < 1e-3 && rel_opt < 1e-10 && rel_floor < 1e-9,
                       "Dt(1 s) = " + fmt("%.6g", fr) + " s (rel " + fmt("%.2g", rel_pin) +
                           "), optimizer rel " + fmt("%.2g", rel_opt) + ", 4 t_p floor rel " +
                           fmt("%.2g", rel_floor)};
    });

    criterion(7, "discretization-bound algebra and continuum threshold", 0.0, [] {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double lc = std::pow(10.0, -3.0 + 6.0 * uni(rng));
            const double mrest = uni(rng) * 0.9 * lc * kSI.c * kSI.c / (4.0 * kSI.G);
            const ClockBody body = ClockBody::make(lc, mrest);
            const std::int64_t p = 1 + std::int64_t(rng() % 1000);
            const std::int64_t z = p + std::int64_t(rng() % 1000);
            const double g = discretization_bound_generic(body, kSI, p, z) * double(p + 1);
            const double e = discretization_bound(body, kSI, p, z) * double(p);
            worst = std::max(worst, std::abs(g - e) / e);
        }
        // Threshold from the constants directly: 2 pi count / (l_C c^4/(4 G hbar) - m c^2/hbar).
        int flips = 0;
        for (int i = 0; i < 20; ++i) {
            const double lc = std::pow(10.0, -40.0 + 10.0 * uni(rng));
            const double mrest = uni(rng) * 0.9 * lc * kSI.c * kSI.c / (4.0 * kSI.G);
            const ClockBody body = ClockBody::make(lc, mrest);
            const long count = 1 + long(rng() % 100);
            const double rate = lc * std::pow(kSI.c, 4) / (4.0 * kSI.G * kSI.hbar) - mrest * kSI.c * kSI.c / kSI.hbar;
            const double threshold = 2.0 * std::numbers::pi * double(count) / rate;
            flips += !continuum_condition(body, kSI, threshold * (1 - 1e-9), count) &&
                     continuum_condition(body, kSI, threshold * (1 + 1e-9), count);
        }
        return Outcome{worst < 1e-14 && flips == 20, "max reduction discrepancy = " + fmt("%.3g", worst) +
                                                         ", threshold flips " + std::to_string(flips) + "/20"};
    });

    criterion(8, "measurement statistics and estimator", 10.0, [] {
        const int p = 15;
        const double T = 16.0;
        const SpectrumRef s = share(build_equally_spaced(p, T, kNat));
        const ClockPOVM povm(s, p, 0.0);
        double delta_err = 0.0;
        for (int k = 0; k <= p; ++k) {
            const OutcomeDistribution d = outcome_probabilities(povm.state(k), povm);
            for (int m = 0; m <= p; ++m) {
                delta_err = std::max(delta_err, std::abs(d.probs[m] - (m == k ? 1.0 : 0.0)));
            }
        }
        const std::int64_t shots = 100000;
        const MeasurementRecord flat = sample(outcome_probabilities(energy_state(s, 0), povm), shots, 8);
        const double mean = double(shots) / (p + 1);
        const double sigma = std::sqrt(mean * (1.0 - 1.0 / (p + 1)));
        double worst_z = 0.0;
        for (auto c : flat.counts) {
            worst_z = std::max(worst_z, std::abs(double(c) - mean) / sigma);
        }
        const double t = 5.3;
        const MeasurementRecord rec = sample(outcome_probabilities(time_state(s, t), povm), 10000, 1234);
        const double miss = circular_distance(estimate_time(rec, T), t, T);
        return Outcome{delta_err < 1e-12 && worst_z < 5.0 && miss <= 2.0 * T / (p + 1),
                       "max |P - delta| = " + fmt("%.3g", delta_err) + ", max |z-score| = " +
                           fmt("%.2f", worst_z) + ", estimator miss = " + fmt("%.3g", miss)};
    });

    criterion(9, "identical seeds give byte-identical measurement JSON", 0.0, [] {
        const auto dir = std::filesystem::temp_directory_path();
        const auto a = dir / "qclock_acceptance_a.json";
        const auto b = dir / "qclock_acceptance_b.json";
        const std::string cmd = std::string("\"") + QCLOCK_TOOL +
                                "\" measure --units natural --p 15 --T 16 --state t:1.3 --shots 10000 --seed 42 -o ";
        const int ra = std::system((cmd + "\"" + a.string() + "\"").c_str());
        const int rb = std::system((cmd + "\"" + b.string() + "\"").c_str());
        const std::string ja = slurp(a);
        const std::string jb = slurp(b);
        std::filesystem::remove(a);
        std::filesystem::remove(b);
        return Outcome{ra == 0 && rb == 0 && !ja.empty() && ja == jb,
                       "two processes, " + std::to_string(ja.size()) + " bytes each, identical = " +
                           (ja == jb ? "yes" : "no")};
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
