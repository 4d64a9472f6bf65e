#include "qclock/errors.hpp"
#include "qclock/spectrum.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace qclock;

namespace {

const ConstantsSet kNat = ConstantsSet::natural();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<RationalRatio> ratios(std::initializer_list<std::pair<int, int>> list) {
    std::vector<RationalRatio> out;
    for (auto [c, b] : list) {
        out.push_back({c, b});
    }
    return out;
}

std::vector<long> as_long(const std::vector<BigInt>& r) {
    std::vector<long> out;
    for (const auto& v : r) {
        out.push_back(v.convert_to<long>());
    }
    return out;
}

// Brute force: smallest denominator q with some |x - c/q| <= eps.
std::pair<long, long> brute_min_denominator(double x, double eps) {
    for (long q = 1;; ++q) {
        const long c = std::lround(x * q);
        for (long cc = c - 1; cc <= c + 1; ++cc) {
            if (std::abs(x - double(cc) / double(q)) <= eps) {
                return {cc, q};
            }
        }
    }
}

} // namespace

TEST_CASE("equally-spaced construction") {
    const ClockSpectrum s1 = build_equally_spaced(1, kTwoPi, kNat);
    CHECK(s1.levels()[0] == 0.0);
    CHECK(s1.levels()[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s1.kind() == SpectrumKind::EquallySpaced);

    const ConstantsSet si = ConstantsSet::codata2018();
    const ClockSpectrum s3 = build_equally_spaced(3, 1.0, si);
    CHECK(std::abs(s3.levels()[3] - 6.0 * std::numbers::pi * si.hbar) <= 1e-15 * s3.levels()[3]);

    const ClockSpectrum s5 = build_equally_spaced(5, 2.0, si);
    CHECK(as_long(s5.r()) == std::vector<long>{0, 1, 2, 3, 4, 5});
    for (std::size_t n = 0; n <= 5; ++n) {
        const double rn = s5.levels()[n] * s5.period() / (kTwoPi * si.hbar);
        CHECK(std::abs(rn - double(n)) <= 1e-12 * std::max(1.0, double(n)));
    }
    CHECK(max_integer(build_equally_spaced(7, 1.0, kNat)) == 7);
}

TEST_CASE("equally-spaced argument errors") {
    CHECK_THROWS_AS(build_equally_spaced(0, 1.0, kNat), Error);
    CHECK_THROWS_AS(build_equally_spaced(3, 0.0, kNat), Error);
    CHECK_THROWS_AS(build_equally_spaced(3, -1.0, kNat), Error);
}

TEST_CASE("rational construction via LCM") {
    // E2/E1 = 3/2, E3/E1 = 2: lcm(2, 1) = 2.
    const ClockSpectrum a = build_rational(ratios({{3, 2}, {2, 1}}), 1.0, kNat);
    CHECK(as_long(a.r()) == std::vector<long>{0, 2, 3, 4});
    CHECK(a.period() == doctest::Approx(kTwoPi * 2.0).epsilon(1e-15));

    const ClockSpectrum b = build_rational(ratios({{2, 1}}), 1.0, kNat);
    CHECK(as_long(b.r()) == std::vector<long>{0, 1, 2});

    const ClockSpectrum c = build_rational(ratios({{5, 3}, {7, 2}}), 0.7, kNat);
    CHECK(as_long(c.r()) == std::vector<long>{0, 6, 10, 21});
    CHECK(max_integer(c) == 21);
    // T = 2 pi hbar r_1 / E_1 and E_n recovers E_1 C_n / B_n.
    CHECK(c.period() == doctest::Approx(kTwoPi * 6.0 / 0.7).epsilon(1e-15));
    CHECK(c.levels()[2] == doctest::Approx(0.7 * 5.0 / 3.0).epsilon(1e-12));
    CHECK(c.levels()[3] == doctest::Approx(0.7 * 3.5).epsilon(1e-12));

    CHECK(max_integer(build_rational({}, 2.0, kNat)) == 1);  // p = 1
}

TEST_CASE("rational construction errors") {
    CHECK_THROWS_AS(build_rational(ratios({{6, 4}}), 1.0, kNat), Error);          // not reduced
    CHECK_THROWS_AS(build_rational(ratios({{2, 1}, {3, 2}}), 1.0, kNat), Error);  // not increasing
    CHECK_THROWS_AS(build_rational(ratios({{1, 1}}), 1.0, kNat), Error);          // E2 = E1
    CHECK_THROWS_AS(build_rational(ratios({{3, 2}, {3, 2}}), 1.0, kNat), Error);  // repeated
    CHECK_THROWS_AS(build_rational(ratios({{3, 2}}), 0.0, kNat), Error);
    CHECK_THROWS_AS(build_rational(std::vector<RationalRatio>{{BigInt(3), BigInt(0)}}, 1.0, kNat),
                    Error);
}

TEST_CASE("capacity budget is enforced, not truncated") {
    // Distinct primes as denominators make the LCM grow as their product.
    std::vector<RationalRatio> rs;
    const int primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    int base = 2;
    for (int q : primes) {
        rs.push_back({BigInt(base * q + 1), BigInt(q)});
        ++base;
    }
    CHECK_NOTHROW(build_rational(rs, 1.0, kNat, 256));
    try {
        build_rational(rs, 1.0, kNat, 40);
        FAIL("expected capacity error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Capacity);
    }
}

TEST_CASE("exact integer relation r_n B_n = r_1 C_n on random spectra") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 2 + int(rng() % 5);
        std::vector<RationalRatio> rs;
        BigInt num = 1, den = 1;  // current ratio, strictly increasing
        for (int n = 2; n <= p; ++n) {
            const long b = 1 + long(rng() % 9);
            long c = (num * b / den).convert_to<long>() + 1 + long(rng() % 5);
            const long g = std::gcd(c, b);
            rs.push_back({BigInt(c / g), BigInt(b / g)});
            num = c / g;
            den = b / g;
        }
        const ClockSpectrum s = build_rational(rs, 1.3, kNat);
        for (std::size_t n = 2; n < s.dimension(); ++n) {
            CHECK(s.r()[n] * rs[n - 2].den == s.r()[1] * rs[n - 2].num);
        }
        for (std::size_t n = 1; n < s.dimension(); ++n) {
            const double rn = s.r()[n].convert_to<double>();
            CHECK(std::abs(s.levels()[n] * s.period() / kTwoPi - rn) <= 1e-12 * rn);
            CHECK(s.r()[n] > s.r()[n - 1]);
        }
    }
}

TEST_CASE("rationalize: exact ratios and pi") {
    const std::vector<double> lv{0.0, 2.0, 3.0};
    const Rationalization r = rationalize(lv, 1e-3);
    REQUIRE(r.ratios.size() == 1);
    CHECK(r.ratios[0] == RationalRatio{3, 2});
    CHECK(r.achieved_error == 0.0);

    const RationalRatio pi = rationalize_value(std::numbers::pi, 2e-3);
    CHECK(pi == RationalRatio{22, 7});
    CHECK(std::abs(std::numbers::pi - 22.0 / 7.0) == doctest::Approx(1.26e-3).epsilon(0.01));
    CHECK(rationalize_value(std::numbers::pi, 0.2) == RationalRatio{3, 1});
    CHECK(rationalize_value(std::numbers::pi, 1e-6) == RationalRatio{355, 113});
}

TEST_CASE("rationalize: golden ratio denominators are Fibonacci numbers") {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<long> denominators;
    for (double eps = 0.5; eps > 1e-12; eps /= 3.0) {
        const RationalRatio q = rationalize_value(phi, eps);
        const long d = q.den.convert_to<long>();
        if (denominators.empty() || denominators.back() != d) {
            denominators.push_back(d);
        }
    }
    REQUIRE(denominators.size() >= 10);
    // Every observed denominator is a Fibonacci number.
    std::vector<long> fib{1, 1};
    while (fib.back() < 10'000'000) {
        fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
    }
    for (long d : denominators) {
        CHECK(std::find(fib.begin(), fib.end(), d) != fib.end());
    }
}

TEST_CASE("rationalize: minimal denominator against brute force") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xs(1.0, 5.0);
    const double epss[] = {0.2, 0.05, 0.01, 3e-3, 1e-3, 2e-4};
    for (int trial = 0; trial < 200; ++trial) {
        const double x = xs(rng);
        double last_err = 1e300;
        for (double eps : epss) {
            const RationalRatio q = rationalize_value(x, eps);
            const auto [bc, bq] = brute_min_denominator(x, eps);
            CHECK(q.den == bq);
            const double err = std::abs(x - q.num.convert_to<double>() / q.den.convert_to<double>());
            CHECK(err <= eps * (1 + 1e-15));
            CHECK(err <= last_err);  // non-increasing as epsilon shrinks
            last_err = err;
        }
    }
    // A case where a semiconvergent beats every convergent: 5/6 = [0; 1, 5].
    CHECK(rationalize_value(5.0 / 6.0, 0.15) == RationalRatio{3, 4});
}

TEST_CASE("rationalize errors") {
    const std::vector<double> lv{0.0, 1.0, 2.5};
    CHECK_THROWS_AS(rationalize(lv, 0.0), Error);
    CHECK_THROWS_AS(rationalize(lv, -1.0), Error);
    const std::vector<double> bad{0.0, 1.0, 1.0};
    CHECK_THROWS_AS(rationalize(bad, 1e-3), Error);
    const std::vector<double> offset{0.5, 1.0, 2.0};
    CHECK_THROWS_AS(rationalize(offset, 1e-3), Error);
}

TEST_CASE("rationalized spectrum keeps the original levels") {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const std::vector<double> lv{0.0, 1.0, phi};
    const ClockSpectrum s = build_rationalized(lv, 1e-4, kNat);
    CHECK(s.kind() == SpectrumKind::RationalizedApprox);
    CHECK(s.levels() == lv);
    CHECK(s.epsilon() == 1e-4);
    CHECK_FALSE(s.exact());
    // E_1 T / (2 pi hbar) = r_1 exactly; higher levels only approximately.
    CHECK(s.levels()[1] * s.period() / kTwoPi == doctest::Approx(s.r()[1].convert_to<double>()));
    const std::vector<double> close{0.0, 1.0, 1.5, 1.52};
    CHECK_THROWS_AS(build_rationalized(close, 0.1, kNat), Error);
}

TEST_CASE("fractional cycles with large integers") {
    CHECK(fractional_cycles(BigInt(3), 0.5) == 0.5);
    CHECK(fractional_cycles(BigInt(7), 1.0) == 0.0);
    CHECK(fractional_cycles(BigInt(5), -0.25) == 0.75);
    // 2^200 * 0.5 is an integer; the double-only path would lose it.
    const BigInt big = BigInt(1) << 200;
    CHECK(fractional_cycles(big, 0.5) == 0.0);
    CHECK(fractional_cycles(big + 1, 0.5) == 0.5);
    CHECK(fractional_cycles(big + 3, 0.25) == 0.75);
}
