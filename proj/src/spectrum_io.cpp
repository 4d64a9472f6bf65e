#include "qclock/spectrum_io.hpp"

#include "qclock/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

namespace qclock {

namespace {

Error parse_error(int lineno, const std::string& msg) {
    return Error(ErrorKind::InvalidArgument,
                 "spectrum file line " + std::to_string(lineno) + ": " + msg);
}

double parse_real(const std::string& token, int lineno) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw parse_error(lineno, "bad number '" + token + "'");
    }
    if (used != token.size()) {
        throw parse_error(lineno, "bad number '" + token + "'");
    }
    return v;
}

RationalRatio parse_ratio(const std::string& token, int lineno) {
    const auto slash = token.find('/');
    if (slash == std::string::npos) {
        throw parse_error(lineno, "expected C/B, got '" + token + "'");
    }
    auto digits = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
            throw parse_error(lineno, "expected non-negative integer, got '" + s + "'");
        }
        return BigInt(s);
    };
    return {digits(token.substr(0, slash)), digits(token.substr(slash + 1))};
}

// Non-empty, comment-stripped lines with their 1-based line numbers.
std::vector<std::pair<int, std::string>> content_lines(std::istream& in) {
    std::vector<std::pair<int, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto last = line.find_last_not_of(" \t\r");
        out.emplace_back(lineno, line.substr(first, last - first + 1));
    }
    return out;
}

bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

} // namespace

std::string format_real(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_spectrum(std::ostream& out, const ClockSpectrum& spec) {
    if (spec.kind() == SpectrumKind::RationalizedApprox) {
        out << "rationalized:" << format_real(spec.epsilon());
    } else {
        out << to_string(spec.kind());
    }
    out << ' ' << spec.p() << ' ' << format_real(spec.period()) << '\n';
    if (spec.kind() == SpectrumKind::Rational) {
        for (const auto& q : spec.ratios()) {
            out << to_string(q) << '\n';
        }
    } else {
        for (double e : spec.levels()) {
            out << format_real(e) << '\n';
        }
    }
}

ClockSpectrum read_spectrum(std::istream& in, const ConstantsSet& consts) {
    const auto lines = content_lines(in);
    if (lines.empty()) {
        throw Error(ErrorKind::InvalidArgument, "spectrum file is empty");
    }
    const auto& [header_line, header] = lines.front();
    std::istringstream hs(header);
    std::string kind, p_token, t_token, extra;
    if (!(hs >> kind >> p_token >> t_token) || (hs >> extra)) {
        throw parse_error(header_line, "header must be '<kind> <p> <T>'");
    }
    long p = 0;
    try {
        std::size_t used = 0;
        p = std::stol(p_token, &used);
        if (used != p_token.size()) {
            throw std::invalid_argument(p_token);
        }
    } catch (const std::exception&) {
        throw parse_error(header_line, "bad p '" + p_token + "'");
    }
    if (p < 1) {
        throw parse_error(header_line, "p must be >= 1");
    }
    const double period = parse_real(t_token, header_line);
    const std::size_t entries = lines.size() - 1;

    if (kind == "rational") {
        if (entries != static_cast<std::size_t>(p - 1)) {
            throw parse_error(header_line, "rational spectrum needs p - 1 ratio lines");
        }
        std::vector<RationalRatio> ratios;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            ratios.push_back(parse_ratio(lines[i].second, lines[i].first));
        }
        BigInt r1 = 1;
        for (const auto& q : ratios) {
            r1 = boost::multiprecision::lcm(r1, q.den);
        }
        const double e1 = 2.0 * std::numbers::pi * consts.hbar * r1.convert_to<double>() / period;
        return build_rational(ratios, e1, consts);
    }

    if (entries != static_cast<std::size_t>(p + 1)) {
        throw parse_error(header_line, "expected p + 1 level lines");
    }
    std::vector<double> levels;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        levels.push_back(parse_real(lines[i].second, lines[i].first));
    }

    if (kind == "equally-spaced") {
        ClockSpectrum spec = build_equally_spaced(static_cast<int>(p), period, consts);
        for (std::size_t n = 0; n < levels.size(); ++n) {
            if (!close(levels[n], spec.levels()[n], 1e-12) && !(n == 0 && levels[n] == 0.0)) {
                throw parse_error(lines[n + 1].first, "level disagrees with 2 pi hbar n / T");
            }
        }
        return spec;
    }
    if (kind.rfind("rationalized:", 0) == 0) {
        const double eps = parse_real(kind.substr(13), header_line);
        ClockSpectrum spec = build_rationalized(levels, eps, consts);
        if (!close(spec.period(), period, 1e-12)) {
            throw parse_error(header_line, "period disagrees with the rationalized levels");
        }
        return spec;
    }
    throw parse_error(header_line, "unknown spectrum kind '" + kind + "'");
}

void save_spectrum(const std::filesystem::path& path, const ClockSpectrum& spec) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    write_spectrum(out, spec);
}

ClockSpectrum load_spectrum(const std::filesystem::path& path, const ConstantsSet& consts) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open spectrum file " + path.string());
    }
    return read_spectrum(in, consts);
}

} // namespace qclock
