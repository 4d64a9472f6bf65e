#include "qclock/errors.hpp"
#include "qclock/spectrum_io.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

using namespace qclock;
using namespace qclock::testing;

namespace {

const ConstantsSet kNat = ConstantsSet::natural();

ClockSpectrum round_trip(const ClockSpectrum& s, const ConstantsSet& k) {
    std::stringstream buf;
    write_spectrum(buf, s);
    return read_spectrum(buf, k);
}

void check_same(const ClockSpectrum& a, const ClockSpectrum& b) {
    CHECK(a.kind() == b.kind());
    CHECK(a.r() == b.r());
    CHECK(std::abs(a.period() - b.period()) <= 1e-15 * a.period());
    REQUIRE(a.levels().size() == b.levels().size());
    for (std::size_t n = 0; n < a.levels().size(); ++n) {
        CHECK(std::abs(a.levels()[n] - b.levels()[n]) <= 1e-15 * std::max(1.0, std::abs(a.levels()[n])));
    }
}

ErrorKind parse_error(const std::string& text) {
    std::istringstream in(text);
    try {
        read_spectrum(in, kNat);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("parsed: " << text);
    return ErrorKind::Io;
}

} // namespace

TEST_CASE("round trip of every spectrum kind") {
    const ConstantsSet si = ConstantsSet::codata2018();
    check_same(build_equally_spaced(5, 2.0, si), round_trip(build_equally_spaced(5, 2.0, si), si));
    const ClockSpectrum rat = build_rational(ratios({{5, 3}, {7, 2}}), 0.7, kNat);
    check_same(rat, round_trip(rat, kNat));
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const std::vector<double> levels{0.0, 1.0, phi, 2.2};
    const ClockSpectrum approx = build_rationalized(levels, 1e-4, kNat);
    const ClockSpectrum back = round_trip(approx, kNat);
    check_same(approx, back);
    CHECK(back.epsilon() == approx.epsilon());

    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        const ClockSpectrum s = random_rational_spectrum(rng, 6, 9);
        check_same(s, round_trip(s, kNat));
    }
}

TEST_CASE("file round trip") {
    const auto path = std::filesystem::temp_directory_path() / "qclock_io_test.spec";
    const ClockSpectrum rat = build_rational(ratios({{3, 2}, {2, 1}}), 1.5, kNat);
    save_spectrum(path, rat);
    check_same(rat, load_spectrum(path, kNat));
    std::filesystem::remove(path);
    try {
        load_spectrum(path, kNat);
        FAIL("missing file accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
}

TEST_CASE("comments and blank lines") {
    std::istringstream in("# clock\n\nrational 3 37.699111843077517\n5/3  # second\n\n7/2\n");
    const ClockSpectrum s = read_spectrum(in, kNat);
    CHECK(s.p() == 3);
    CHECK(max_integer(s) == 21);
}

TEST_CASE("malformed input") {
    CHECK(parse_error("") != ErrorKind::Capacity);
    CHECK(parse_error("triangular 2 1.0\n0\n1\n2\n") == ErrorKind::InvalidArgument);
    CHECK(parse_error("equally-spaced 2 1.0\n0\n6.283185307179586\n") == ErrorKind::InvalidArgument);
    CHECK(parse_error("rational 3 37.7\n5/3\n") == ErrorKind::InvalidArgument);
    CHECK(parse_error("rational 2 6.28\nfive/3\n") == ErrorKind::InvalidArgument);
    CHECK(parse_error("rational 2 6.28\n6/4\n") == ErrorKind::InvalidArgument);
    CHECK(parse_error("equally-spaced 1 2.0\n0\n3.14159\n3\n") == ErrorKind::InvalidArgument);
}

TEST_CASE("real formatting keeps 17 digits") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_real(std::acos(-1.0))) == std::acos(-1.0));
}
