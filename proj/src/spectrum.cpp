#include "qclock/spectrum.hpp"

#include "qclock/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qclock {

namespace mp = boost::multiprecision;
using BigRational = mp::cpp_rational;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRelationTol = 1e-12;

void require(bool ok, ErrorKind kind, const std::string& msg) {
    if (!ok) {
        throw Error(kind, msg);
    }
}

void check_capacity(const BigInt& value, unsigned bits, const char* what) {
    if (mp::msb(value) >= bits) {
        throw Error(ErrorKind::Capacity, std::string(what) + " exceeds the big-integer budget of 2^" +
                                             std::to_string(bits));
    }
}

double to_double(const BigInt& v) { return v.convert_to<double>(); }

// Exact rational value of a finite double.
BigRational exact(double x) {
    int exp = 0;
    const double frac = std::frexp(x, &exp);
    const auto mant = static_cast<long long>(std::ldexp(frac, 53));
    BigRational value = BigInt(mant);
    exp -= 53;
    if (exp >= 0) {
        value *= BigInt(1) << exp;
    } else {
        value /= BigInt(1) << -exp;
    }
    return value;
}

// Validates E_n * T / (2 pi hbar) = r_n to relative kRelationTol.
void check_key_relation(const std::vector<double>& levels, const std::vector<BigInt>& r,
                        double period, double hbar) {
    for (std::size_t n = 1; n < levels.size(); ++n) {
        const double rn = to_double(r[n]);
        const double lhs = levels[n] * period / (kTwoPi * hbar);
        if (std::abs(lhs - rn) > kRelationTol * rn) {
            throw Error(ErrorKind::InvalidArgument,
                        "level " + std::to_string(n) + " is inconsistent with its phase integer");
        }
    }
}

} // namespace

void validate(const RationalRatio& ratio) {
    require(ratio.den >= 1, ErrorKind::InvalidArgument, "ratio denominator must be >= 1");
    require(ratio.num >= 0, ErrorKind::InvalidArgument, "ratio numerator must be >= 0");
    require(mp::gcd(ratio.num, ratio.den) == 1, ErrorKind::InvalidArgument,
            "ratio " + to_string(ratio) + " is not reduced");
}

std::string to_string(const RationalRatio& ratio) {
    return ratio.num.str() + "/" + ratio.den.str();
}

std::string_view to_string(SpectrumKind kind) noexcept {
    switch (kind) {
    case SpectrumKind::EquallySpaced: return "equally-spaced";
    case SpectrumKind::Rational: return "rational";
    case SpectrumKind::RationalizedApprox: return "rationalized";
    }
    return "unknown";
}

ClockSpectrum build_equally_spaced(int p, double period, const ConstantsSet& consts) {
    validate(consts);
    require(p >= 1, ErrorKind::InvalidArgument, "p must be >= 1");
    require(std::isfinite(period) && period > 0.0, ErrorKind::InvalidArgument, "T must be > 0");

    ClockSpectrum s;
    s.kind_ = SpectrumKind::EquallySpaced;
    s.period_ = period;
    s.hbar_ = consts.hbar;
    const double gap = kTwoPi * consts.hbar / period;
    s.levels_.resize(static_cast<std::size_t>(p) + 1);
    s.r_.resize(s.levels_.size());
    for (int n = 0; n <= p; ++n) {
        s.levels_[n] = gap * n;
        s.r_[n] = n;
    }
    return s;
}

ClockSpectrum build_rational(std::span<const RationalRatio> ratios, double e1,
                             const ConstantsSet& consts, unsigned capacity_bits) {
    validate(consts);
    require(std::isfinite(e1) && e1 > 0.0, ErrorKind::InvalidArgument, "E_1 must be > 0");

    BigRational prev = 1;
    BigInt r1 = 1;
    for (const auto& ratio : ratios) {
        validate(ratio);
        const BigRational value(ratio.num, ratio.den);
        require(value > prev, ErrorKind::InvalidArgument,
                "ratios must be strictly increasing and > 1 (non-degenerate levels)");
        prev = value;
        r1 = mp::lcm(r1, ratio.den);
        check_capacity(r1, capacity_bits, "r_1 = lcm of denominators");
    }

    ClockSpectrum s;
    s.kind_ = SpectrumKind::Rational;
    s.hbar_ = consts.hbar;
    s.ratios_.assign(ratios.begin(), ratios.end());
    s.r_.reserve(ratios.size() + 2);
    s.r_.push_back(0);
    s.r_.push_back(r1);
    for (const auto& ratio : ratios) {
        BigInt rn = r1 / ratio.den * ratio.num;
        check_capacity(rn, capacity_bits, "r_n");
        s.r_.push_back(std::move(rn));
    }

    s.period_ = kTwoPi * consts.hbar * to_double(r1) / e1;
    require(std::isfinite(s.period_) && s.period_ > 0.0, ErrorKind::InvalidArgument,
            "period is not representable");
    s.levels_.resize(s.r_.size());
    s.levels_[0] = 0.0;
    s.levels_[1] = e1;
    for (std::size_t n = 2; n < s.r_.size(); ++n) {
        const auto& q = ratios[n - 2];
        s.levels_[n] = e1 * (to_double(q.num) / to_double(q.den));
    }
    check_key_relation(s.levels_, s.r_, s.period_, s.hbar_);
    return s;
}

RationalRatio rationalize_value(double x, double epsilon) {
    require(std::isfinite(epsilon) && epsilon > 0.0, ErrorKind::InvalidArgument,
            "epsilon must be > 0");
    require(std::isfinite(x) && x >= 0.0, ErrorKind::InvalidArgument,
            "ratio must be finite and non-negative");

    const BigRational target = exact(x);
    const BigRational tol = exact(epsilon);
    auto within = [&](const BigInt& num, const BigInt& den) {
        return mp::abs(target - BigRational(num, den)) <= tol;
    };
    // Best numerator for a given denominator.
    auto nearest = [&](const BigInt& den) {
        const BigRational scaled = target * den;
        BigInt lo = mp::numerator(scaled) / mp::denominator(scaled);
        BigInt hi = lo + 1;
        return (scaled - lo <= hi - scaled) ? lo : hi;
    };

    // Candidates in increasing denominator order: within each continued-
    // fraction block the semiconvergents (h_{k-2} + j h_{k-1})/(k_{k-2} + j k_{k-1}),
    // j = 1..a_k, approach the target monotonically and end at convergent k.
    // Every best approximation of the first kind is among them, so the first
    // candidate within tolerance has the smallest possible denominator.
    BigInt h_prev2 = 0, k_prev2 = 1;  // h_{-2}, k_{-2}
    BigInt h_prev1 = 1, k_prev1 = 0;  // h_{-1}, k_{-1}
    BigInt num = mp::numerator(target);
    BigInt den = mp::denominator(target);
    auto finish = [&](const BigInt& d) {
        const BigInt c = nearest(d);
        const BigInt g = mp::gcd(c, d);
        return RationalRatio{c / g, d / g};
    };
    while (true) {
        const BigInt a = num / den;
        auto semi_ok = [&](const BigInt& j) {
            return within(h_prev2 + j * h_prev1, k_prev2 + j * k_prev1);
        };
        if (a >= 1 && semi_ok(a)) {
            BigInt lo = 0, hi = a;  // semi_ok(hi) holds; smallest j >= 1 wanted
            while (lo + 1 < hi) {
                const BigInt mid = (lo + hi) / 2;
                if (semi_ok(mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return finish(k_prev2 + hi * k_prev1);
        }
        const BigInt h = a * h_prev1 + h_prev2;
        const BigInt k = a * k_prev1 + k_prev2;
        h_prev2 = h_prev1;
        k_prev2 = k_prev1;
        h_prev1 = h;
        k_prev1 = k;
        const BigInt rem = num - a * den;
        if (rem == 0) {
            return finish(k);  // the last convergent is the target itself
        }
        num = den;
        den = rem;
    }
}

Rationalization rationalize(std::span<const double> levels, double epsilon) {
    require(std::isfinite(epsilon) && epsilon > 0.0, ErrorKind::InvalidArgument,
            "epsilon must be > 0");
    require(levels.size() >= 2, ErrorKind::InvalidArgument, "need at least two levels (p >= 1)");
    require(levels[0] == 0.0, ErrorKind::InvalidArgument, "E_0 must be 0");
    for (std::size_t n = 1; n < levels.size(); ++n) {
        require(std::isfinite(levels[n]) && levels[n] > levels[n - 1], ErrorKind::InvalidArgument,
                "levels must be finite and strictly increasing");
    }

    Rationalization out;
    const double e1 = levels[1];
    for (std::size_t n = 2; n < levels.size(); ++n) {
        const double x = levels[n] / e1;
        RationalRatio q = rationalize_value(x, epsilon);
        const double err = mp::abs(exact(x) - BigRational(q.num, q.den)).convert_to<double>();
        out.achieved_error = std::max(out.achieved_error, err);
        out.ratios.push_back(std::move(q));
    }
    return out;
}

ClockSpectrum build_rationalized(std::span<const double> levels, double epsilon,
                                 const ConstantsSet& consts, unsigned capacity_bits) {
    const Rationalization fit = rationalize(levels, epsilon);
    ClockSpectrum approx;
    try {
        approx = build_rational(fit.ratios, levels[1], consts, capacity_bits);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) {
            throw Error(ErrorKind::InvalidArgument,
                        "rationalization at this epsilon merges levels; decrease epsilon");
        }
        throw;
    }
    approx.kind_ = SpectrumKind::RationalizedApprox;
    approx.epsilon_ = epsilon;
    approx.levels_.assign(levels.begin(), levels.end());
    return approx;
}

const BigInt& max_integer(const ClockSpectrum& spec) { return spec.r().back(); }

double fractional_cycles(const BigInt& r, double x) {
    if (mp::msb(mp::abs(r) + 1) < 53) {
        // r is exact in a double; fma recovers the rounding error of r * x.
        const double rd = r.convert_to<double>();
        const double hi = rd * x;
        const double lo = std::fma(rd, x, -hi);
        double f = (hi - std::floor(hi)) + lo;
        f -= std::floor(f);
        return f >= 1.0 ? 0.0 : f;
    }
    // x = mant * 2^exp exactly; reduce r * mant modulo 2^-exp.
    int exp = 0;
    const double frac = std::frexp(x, &exp);
    const auto mant = static_cast<long long>(std::ldexp(frac, 53));
    exp -= 53;
    if (exp >= 0) {
        return 0.0;
    }
    const BigInt modulus = BigInt(1) << -exp;
    BigInt prod = r * mant;
    prod %= modulus;
    if (prod < 0) {
        prod += modulus;
    }
    // Keep the top 64 bits of the remainder before converting.
    const int shift = std::max(0, -exp - 64);
    const BigInt top = prod >> shift;
    const double f = std::ldexp(top.convert_to<double>(), exp + shift);
    return f >= 1.0 ? 0.0 : f;
}

} // namespace qclock
