#pragma once

#include "qclock/spectrum.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace qclock {

// Text format, one header line followed by one entry per line:
//
//   equally-spaced <p> <T>       then E_0 .. E_p
//   rational <p> <T>             then C_n/B_n for n = 2..p
//   rationalized:<eps> <p> <T>   then E_0 .. E_p (original levels)
//
// Blank lines and `#` comments are ignored. Reals are written with 17
// significant digits, integers in decimal.

void write_spectrum(std::ostream& out, const ClockSpectrum& spec);
ClockSpectrum read_spectrum(std::istream& in, const ConstantsSet& consts);

void save_spectrum(const std::filesystem::path& path, const ClockSpectrum& spec);
ClockSpectrum load_spectrum(const std::filesystem::path& path, const ConstantsSet& consts);

/// printf("%.17g") formatting shared by all text outputs.
std::string format_real(double value);

} // namespace qclock
