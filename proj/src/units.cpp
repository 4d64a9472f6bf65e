#include "qclock/units.hpp"

#include "qclock/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace qclock {

std::string_view to_string(UnitMode mode) noexcept {
    return mode == UnitMode::SI ? "si" : "natural";
}

ConstantsSet ConstantsSet::codata2018() noexcept {
    return {1.054571817e-34, 299792458.0, 6.67430e-11, UnitMode::SI};
}

ConstantsSet ConstantsSet::natural() noexcept {
    return {1.0, 1.0, 1.0, UnitMode::Natural};
}

void validate(const ConstantsSet& k) {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(k.hbar) || !ok(k.c) || !ok(k.G)) {
        throw Error(ErrorKind::InvalidConstants, "hbar, c and G must be finite and positive");
    }
    if (k.mode == UnitMode::Natural && (k.hbar != 1.0 || k.c != 1.0 || k.G != 1.0)) {
        throw Error(ErrorKind::InvalidConstants, "natural mode requires hbar = c = G = 1");
    }
}

PlanckScale derive_planck_scale(const ConstantsSet& k) {
    validate(k);
    if (k.mode == UnitMode::Natural) {
        return {1.0, 1.0};
    }
    // sqrt(hbar G) is shared; c^{3/2} and c^{5/2} are formed without c^5
    // to stay well inside double range.
    const double root_hg = std::sqrt(k.hbar) * std::sqrt(k.G);
    const double c32 = k.c * std::sqrt(k.c);
    return {root_hg / c32, root_hg / (c32 * k.c)};
}

ConstantsSet load_constants(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open constants file " + path.string());
    }
    ConstantsSet k = ConstantsSet::codata2018();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw Error(ErrorKind::InvalidConstants,
                            path.string() + ":" + std::to_string(lineno) + ": expected key = value");
            }
            continue;
        }
        std::istringstream key_in(line.substr(0, eq));
        std::string key;
        key_in >> key;
        double value = 0.0;
        try {
            value = std::stod(line.substr(eq + 1));
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidConstants,
                        path.string() + ":" + std::to_string(lineno) + ": bad number");
        }
        if (key == "hbar") {
            k.hbar = value;
        } else if (key == "c") {
            k.c = value;
        } else if (key == "G") {
            k.G = value;
        } else {
            throw Error(ErrorKind::InvalidConstants,
                        path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    validate(k);
    return k;
}

ConstantsSet resolve_constants(UnitMode mode, const std::filesystem::path& explicit_path) {
    if (mode == UnitMode::Natural) {
        return ConstantsSet::natural();
    }
    if (!explicit_path.empty()) {
        return load_constants(explicit_path);
    }
    if (const char* env = std::getenv("QCLOCK_CONSTANTS"); env != nullptr && *env != '\0') {
        return load_constants(env);
    }
    return ConstantsSet::codata2018();
}

} // namespace qclock
