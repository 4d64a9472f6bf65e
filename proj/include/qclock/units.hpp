#pragma once

#include <filesystem>
#include <string_view>

namespace qclock {

enum class UnitMode { SI, Natural };

std::string_view to_string(UnitMode mode) noexcept;

/// Physical constants consumed by every other module. In natural mode all
/// three are exactly 1.
struct ConstantsSet {
    double hbar;  // J s
    double c;     // m / s
    double G;     // m^3 kg^-1 s^-2
    UnitMode mode;

    /// CODATA 2018 values.
    static ConstantsSet codata2018() noexcept;
    static ConstantsSet natural() noexcept;

    bool operator==(const ConstantsSet&) const = default;
};

/// Throws invalid-constants unless all constants are finite and positive and,
/// in natural mode, exactly 1.
void validate(const ConstantsSet& consts);

struct PlanckScale {
    double length;  // l_p = sqrt(hbar G / c^3)
    double time;    // t_p = sqrt(hbar G / c^5)
};

PlanckScale derive_planck_scale(const ConstantsSet& consts);

/// Parses a `key = value` constants file (keys hbar, c, G; `#` comments).
/// Missing keys keep their CODATA 2018 values.
ConstantsSet load_constants(const std::filesystem::path& path);

/// Resolves the SI constants source: explicit path if non-empty, else the file
/// named by $QCLOCK_CONSTANTS, else built-in CODATA 2018.
ConstantsSet resolve_constants(UnitMode mode, const std::filesystem::path& explicit_path = {});

} // namespace qclock
