#include "qclock/cli.hpp"

#include "qclock/bounds.hpp"
#include "qclock/clockstates.hpp"
#include "qclock/errors.hpp"
#include "qclock/measurement.hpp"
#include "qclock/spectrum.hpp"
#include "qclock/spectrum_io.hpp"
#include "qclock/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace qclock::cli {

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Options shared by every subcommand.
struct Common {
    std::string units = "si";
    std::string constants_path;
    std::string output;
};

struct SpectrumSource {
    std::string file;
    std::optional<int> p;
    std::optional<double> period;
    std::string ratios;
    std::optional<double> e1;
    std::string levels;
    std::optional<double> epsilon;
};

struct Config {
    std::string command;
    Common common;
    SpectrumSource source;
    std::optional<std::int64_t> z;
    double tau0 = 0.0;
    // measure
    std::string state = "taum:0";
    std::int64_t shots = 1000;
    std::uint64_t seed = 0;
    std::string csv;
    // bounds
    std::optional<double> lc;
    double mrest = 0.0;
    std::optional<double> mass;
    std::optional<double> theta;
    std::string sweep;
};

UnitMode unit_mode(const Common& c) {
    return c.units == "natural" ? UnitMode::Natural : UnitMode::SI;
}

ordered_json big_json(const BigInt& v) {
    if (v <= std::numeric_limits<std::int64_t>::max()) {
        return v.convert_to<std::int64_t>();
    }
    return v.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw UsageError("cannot parse " + what + " '" + s + "'");
}

ClockSpectrum load_source(const SpectrumSource& src, const ConstantsSet& k) {
    const int chosen = int(!src.file.empty()) + int(src.p.has_value()) + int(!src.ratios.empty()) +
                       int(!src.levels.empty());
    if (chosen != 1) {
        throw UsageError("give exactly one of --spectrum, --p/--T, --ratios/--E1, --levels/--epsilon");
    }
    if (!src.file.empty()) {
        return load_spectrum(src.file, k);
    }
    if (src.p) {
        if (!src.period) {
            throw UsageError("--p requires --T");
        }
        return build_equally_spaced(*src.p, *src.period, k);
    }
    if (!src.ratios.empty()) {
        if (!src.e1) {
            throw UsageError("--ratios requires --E1");
        }
        std::vector<RationalRatio> ratios;
        for (const auto& tok : split(src.ratios, ',')) {
            const auto slash = tok.find('/');
            try {
                if (slash == std::string::npos) {
                    ratios.push_back({BigInt(tok), BigInt(1)});
                } else {
                    ratios.push_back({BigInt(tok.substr(0, slash)), BigInt(tok.substr(slash + 1))});
                }
            } catch (const std::exception&) {
                throw UsageError("cannot parse ratio '" + tok + "'");
            }
        }
        return build_rational(ratios, *src.e1, k);
    }
    if (!src.epsilon) {
        throw UsageError("--levels requires --epsilon");
    }
    std::vector<double> levels;
    for (const auto& tok : split(src.levels, ',')) {
        levels.push_back(parse_double(tok, "level"));
    }
    return build_rationalized(levels, *src.epsilon, k);
}

ordered_json source_json(const SpectrumSource& s) {
    ordered_json j;
    if (!s.file.empty()) j["spectrum"] = s.file;
    if (s.p) j["p"] = *s.p;
    if (s.period) j["T"] = *s.period;
    if (!s.ratios.empty()) j["ratios"] = s.ratios;
    if (s.e1) j["E1"] = *s.e1;
    if (!s.levels.empty()) j["levels"] = s.levels;
    if (s.epsilon) j["epsilon"] = *s.epsilon;
    return j;
}

ordered_json envelope(const Config& cfg, const ConstantsSet& k) {
    ordered_json j;
    j["tool"] = "qclock";
    j["version"] = QCLOCK_VERSION;
    j["command"] = cfg.command;
    j["units"] = std::string(to_string(k.mode));
    j["constants"] = {{"hbar", k.hbar}, {"c", k.c}, {"G", k.G}};
    return j;
}

void emit(const Common& common, std::ostream& out, const std::string& text) {
    if (common.output.empty()) {
        out << text;
        return;
    }
    std::ofstream file(common.output, std::ios::binary);
    if (!file) {
        throw Error(ErrorKind::Io, "cannot write " + common.output);
    }
    file << text;
}

std::int64_t default_z(const ClockSpectrum& spec) {
    // Smallest complete POVM: z + 1 = r_p + 1.
    const BigInt& rp = max_integer(spec);
    if (rp >= std::numeric_limits<std::int64_t>::max()) {
        throw Error(ErrorKind::Capacity, "r_p too large for a discrete grid");
    }
    return std::max(rp.convert_to<std::int64_t>(), static_cast<std::int64_t>(spec.p()));
}

// --- build -----------------------------------------------------------------

int cmd_build(const Config& cfg, std::ostream& out) {
    const ConstantsSet k = resolve_constants(unit_mode(cfg.common), cfg.common.constants_path);
    const ClockSpectrum spec = load_source(cfg.source, k);
    std::ostringstream text;
    write_spectrum(text, spec);
    emit(cfg.common, out, text.str());
    return 0;
}

// --- check-identity --------------------------------------------------------

int cmd_check_identity(const Config& cfg, std::ostream& out) {
    const ConstantsSet k = resolve_constants(unit_mode(cfg.common), cfg.common.constants_path);
    const SpectrumRef spec = share(load_source(cfg.source, k));
    const std::int64_t z = cfg.z.value_or(default_z(*spec));
    const double residual = identity_residual(spec, z, cfg.tau0);

    ordered_json j = envelope(cfg, k);
    ordered_json config = source_json(cfg.source);
    config["z"] = z;
    config["tau0"] = cfg.tau0;
    j["config"] = config;
    j["kind"] = std::string(to_string(spec->kind()));
    j["p"] = spec->p();
    j["z"] = z;
    j["r_max"] = big_json(max_integer(*spec));
    j["residual"] = residual;
    j["condition_zp1_gt_rp"] = BigInt(z) + 1 > max_integer(*spec);
    emit(cfg.common, out, j.dump(2) + "\n");
    return 0;
}

// --- measure ---------------------------------------------------------------

TimeState prepare_state(const std::string& desc, const ClockPOVM& povm) {
    const auto colon = desc.find(':');
    if (colon == std::string::npos) {
        throw UsageError("--state must be taum:k, energy:n or t:F");
    }
    const std::string kind = desc.substr(0, colon);
    const std::string value = desc.substr(colon + 1);
    if (kind == "t") {
        return time_state(povm.spectrum(), parse_double(value, "state time"));
    }
    long long index = 0;
    try {
        std::size_t used = 0;
        index = std::stoll(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
    } catch (const std::exception&) {
        throw UsageError("cannot parse state index '" + value + "'");
    }
    if (kind == "taum") {
        if (index < 0 || index > povm.z()) {
            throw Error(ErrorKind::InvalidArgument, "grid index outside 0..z");
        }
        return povm.state(index);
    }
    if (kind == "energy") {
        if (index < 0) {
            throw Error(ErrorKind::InvalidArgument, "energy index must be >= 0");
        }
        return energy_state(povm.spectrum(), static_cast<std::size_t>(index));
    }
    throw UsageError("--state must be taum:k, energy:n or t:F");
}

int cmd_measure(const Config& cfg, std::ostream& out) {
    const ConstantsSet k = resolve_constants(unit_mode(cfg.common), cfg.common.constants_path);
    const SpectrumRef spec = share(load_source(cfg.source, k));
    const std::int64_t z = cfg.z.value_or(default_z(*spec));
    const ClockPOVM povm(spec, z, cfg.tau0);
    const TimeState psi = prepare_state(cfg.state, povm);
    const OutcomeDistribution dist = outcome_probabilities(psi, povm);
    const MeasurementRecord rec = sample(dist, cfg.shots, cfg.seed);

    double total = 0.0;
    for (double p : dist.probs) {
        total += p;
    }

    ordered_json j = envelope(cfg, k);
    ordered_json config = source_json(cfg.source);
    config["z"] = z;
    config["tau0"] = cfg.tau0;
    config["state"] = cfg.state;
    config["shots"] = cfg.shots;
    config["seed"] = cfg.seed;
    config["rng"] = "mt19937_64";
    if (!cfg.csv.empty()) config["csv"] = cfg.csv;
    j["config"] = config;
    j["seed"] = rec.seed;
    j["shots"] = rec.shots;
    j["period"] = spec->period();
    j["probability_sum"] = total;
    j["counts"] = rec.counts;
    if (rec.has_estimate) {
        j["estimate"] = rec.estimate;
        j["estimate_error"] = rec.estimate_error;
    } else {
        j["estimate"] = nullptr;
        j["estimate_error"] = nullptr;
    }
    if (!cfg.csv.empty()) {
        std::ofstream csv(cfg.csv, std::ios::binary);
        if (!csv) {
            throw Error(ErrorKind::Io, "cannot write " + cfg.csv);
        }
        csv << "m,tau,probability,count\n";
        for (std::size_t m = 0; m < rec.counts.size(); ++m) {
            csv << m << ',' << format_real(dist.tau_grid[m]) << ',' << format_real(dist.probs[m])
                << ',' << rec.counts[m] << '\n';
        }
    }
    emit(cfg.common, out, j.dump(2) + "\n");
    return 0;
}

// --- bounds / sweep --------------------------------------------------------

struct BoundsInputs {
    ClockBody body;
    ClockSpectrum spec;
    std::int64_t z;
    std::optional<double> theta;
};

BoundsInputs bounds_inputs(const Config& cfg, const ConstantsSet& k) {
    if (!cfg.lc) {
        throw UsageError("--lc is required");
    }
    ClockSpectrum spec = load_source(cfg.source, k);
    const std::int64_t z = cfg.z.value_or(spec.kind() == SpectrumKind::EquallySpaced
                                              ? static_cast<std::int64_t>(spec.p())
                                              : default_z(spec));
    return {ClockBody::make(*cfg.lc, cfg.mrest, cfg.mass), std::move(spec), z, cfg.theta};
}

ordered_json report_json(const BoundReport& r) {
    ordered_json j;
    j["delta_tau"] = r.delta_tau;
    j["delta_tau_min"] = r.delta_tau_min;
    j["continuum_condition"] = r.continuum;
    j["structural_dt"] = r.structural_dt;
    j["speed_limit_dt"] = r.speed_limit_dt;
    j["speed_limit_floor"] = r.speed_limit_floor;
    j["spreading_dt"] = r.spreading_dt;
    j["delta_x_opt"] = r.delta_x_opt;
    j["delta_v"] = r.delta_v;
    j["mass_limit"] = r.mass_limit;
    j["optimal_mass"] = r.optimal_mass;
    j["fundamental_dt"] = r.fundamental_dt;
    j["theta"] = r.theta;
    j["binding"] = std::string(to_string(r.binding));
    return j;
}

struct SweepSpec {
    std::string param;
    double min;
    double max;
    int steps;
};

SweepSpec parse_sweep(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) {
        throw UsageError("--sweep must be param:min:max:steps");
    }
    static const std::vector<std::string> params{"lc", "mrest", "mass", "T", "p", "z", "theta"};
    if (std::find(params.begin(), params.end(), parts[0]) == params.end()) {
        throw UsageError("unknown sweep parameter '" + parts[0] + "'");
    }
    SweepSpec s{parts[0], parse_double(parts[1], "sweep min"), parse_double(parts[2], "sweep max"), 0};
    const double steps = parse_double(parts[3], "sweep steps");
    if (steps < 1 || steps != std::floor(steps) || steps > 1e6) {
        throw UsageError("sweep steps must be an integer in 1..1e6");
    }
    s.steps = static_cast<int>(steps);
    return s;
}

std::string sweep_csv(const Config& cfg, const ConstantsSet& k) {
    const SweepSpec sw = parse_sweep(cfg.sweep);
    std::ostringstream csv;
    csv << sw.param
        << ",delta_tau_min,structural_dt,speed_limit_dt,spreading_dt,fundamental_dt,binding\n";
    for (int i = 0; i < sw.steps; ++i) {
        const double x =
            sw.steps == 1 ? sw.min : sw.min + (sw.max - sw.min) * static_cast<double>(i) / (sw.steps - 1);
        Config point = cfg;
        if (sw.param == "lc") point.lc = x;
        else if (sw.param == "mrest") point.mrest = x;
        else if (sw.param == "mass") point.mass = x;
        else if (sw.param == "theta") point.theta = x;
        else if (sw.param == "z") point.z = static_cast<std::int64_t>(std::llround(x));
        else if (sw.param == "p") point.source.p = static_cast<int>(std::lround(x));
        else if (sw.param == "T") point.source.period = x;
        csv << format_real(x);
        try {
            const BoundsInputs in = bounds_inputs(point, k);
            const BoundReport r = bound_report(in.body, k, in.spec, in.z, in.theta);
            csv << ',' << format_real(r.delta_tau_min) << ',' << format_real(r.structural_dt) << ','
                << format_real(r.speed_limit_dt) << ',' << format_real(r.spreading_dt) << ','
                << format_real(r.fundamental_dt) << ',' << to_string(r.binding) << '\n';
        } catch (const Error& e) {
            csv << ",nan,nan,nan,nan,nan,error:" << e.name() << '\n';
        }
    }
    return csv.str();
}

ordered_json bounds_config(const Config& cfg, const BoundsInputs& in) {
    ordered_json config = source_json(cfg.source);
    config["lc"] = in.body.diameter;
    config["mrest"] = in.body.rest_mass;
    config["mass"] = in.body.mass;
    config["z"] = in.z;
    config["theta"] = in.theta ? ordered_json(*in.theta) : ordered_json(nullptr);
    if (!cfg.sweep.empty()) config["sweep"] = cfg.sweep;
    if (!cfg.csv.empty()) config["csv"] = cfg.csv;
    return config;
}

int cmd_bounds(const Config& cfg, std::ostream& out) {
    const ConstantsSet k = resolve_constants(unit_mode(cfg.common), cfg.common.constants_path);
    const BoundsInputs in = bounds_inputs(cfg, k);
    const BoundReport rep = bound_report(in.body, k, in.spec, in.z, in.theta);

    ordered_json j = envelope(cfg, k);
    j["config"] = bounds_config(cfg, in);
    j["p"] = in.spec.p();
    j["T"] = in.spec.period();
    j["r_max"] = big_json(max_integer(in.spec));
    j["report"] = report_json(rep);
    if (!cfg.sweep.empty()) {
        const std::string csv = sweep_csv(cfg, k);
        if (cfg.csv.empty()) {
            throw UsageError("--sweep with bounds needs --csv FILE (or use the sweep command)");
        }
        std::ofstream file(cfg.csv, std::ios::binary);
        if (!file) {
            throw Error(ErrorKind::Io, "cannot write " + cfg.csv);
        }
        file << csv;
    }
    emit(cfg.common, out, j.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const Config& cfg, std::ostream& out) {
    const ConstantsSet k = resolve_constants(unit_mode(cfg.common), cfg.common.constants_path);
    if (!cfg.lc) {
        throw UsageError("--lc is required");
    }
    std::ostringstream text;
    text << "# qclock " << QCLOCK_VERSION << " sweep " << cfg.sweep << " units=" << to_string(k.mode)
         << '\n';
    text << sweep_csv(cfg, k);
    emit(cfg.common, out, text.str());
    return 0;
}

void add_common(CLI::App* app, Config& cfg) {
    app->add_option("--units", cfg.common.units, "Unit mode")
        ->check(CLI::IsMember({"si", "natural"}))
        ->capture_default_str();
    app->add_option("--constants", cfg.common.constants_path,
                    "SI constants file (key = value); $QCLOCK_CONSTANTS if unset");
    app->add_option("--output,-o", cfg.common.output, "Write the result here instead of stdout");
}

void add_source(CLI::App* app, Config& cfg) {
    app->add_option("--spectrum", cfg.source.file, "Spectrum file");
    app->add_option("--p", cfg.source.p, "Equally-spaced spectrum: highest level index");
    app->add_option("--T", cfg.source.period, "Equally-spaced spectrum: period");
    app->add_option("--ratios", cfg.source.ratios, "Rational spectrum: E_n/E_1 as C/B list, n = 2..p");
    app->add_option("--E1", cfg.source.e1, "Rational spectrum: first excited level");
    app->add_option("--levels", cfg.source.levels, "Arbitrary levels E_0..E_p (comma separated)");
    app->add_option("--epsilon", cfg.source.epsilon, "Rationalization tolerance for --levels");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config cfg;
    CLI::App app{"Finite-dimensional quantum clock laboratory", "qclock"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("qclock ") + QCLOCK_VERSION);

    auto* build = app.add_subcommand("build", "Build a spectrum and write it in the text format");
    add_common(build, cfg);
    add_source(build, cfg);

    auto* check = app.add_subcommand("check-identity", "Resolution-of-identity residual of the POVM");
    add_common(check, cfg);
    add_source(check, cfg);
    check->add_option("--z", cfg.z, "Grid size parameter (z + 1 outcomes); default max(p, r_p)");
    check->add_option("--tau0", cfg.tau0, "Time origin");

    auto* measure = app.add_subcommand("measure", "Simulate time measurements");
    add_common(measure, cfg);
    add_source(measure, cfg);
    measure->add_option("--z", cfg.z, "Grid size parameter; default max(p, r_p)");
    measure->add_option("--tau0", cfg.tau0, "Time origin");
    measure->add_option("--state", cfg.state, "taum:k | energy:n | t:F")->capture_default_str();
    measure->add_option("--shots", cfg.shots, "Number of shots")->capture_default_str();
    measure->add_option("--seed", cfg.seed, "mt19937_64 seed")->capture_default_str();
    measure->add_option("--csv", cfg.csv, "Also write the histogram as CSV");

    auto add_bounds = [&](CLI::App* sub) {
        add_common(sub, cfg);
        add_source(sub, cfg);
        sub->add_option("--lc", cfg.lc, "Clock diameter");
        sub->add_option("--mrest", cfg.mrest, "Rest mass")->capture_default_str();
        sub->add_option("--mass", cfg.mass, "Inertial mass for the spreading bound (default: rest mass)");
        sub->add_option("--z", cfg.z, "Grid size parameter");
        sub->add_option("--theta", cfg.theta, "Operational time (default: T)");
    };
    auto* bounds = app.add_subcommand("bounds", "Evaluate every time limit for a clock");
    add_bounds(bounds);
    bounds->add_option("--sweep", cfg.sweep, "param:min:max:steps");
    bounds->add_option("--csv", cfg.csv, "CSV file for --sweep");

    auto* sweep = app.add_subcommand("sweep", "Tabulate the limits along one parameter as CSV");
    add_bounds(sweep);
    sweep->add_option("--sweep", cfg.sweep, "param:min:max:steps")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << "qclock " << QCLOCK_VERSION << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (build->parsed()) {
            cfg.command = "build";
            return cmd_build(cfg, out);
        }
        if (check->parsed()) {
            cfg.command = "check-identity";
            return cmd_check_identity(cfg, out);
        }
        if (measure->parsed()) {
            cfg.command = "measure";
            return cmd_measure(cfg, out);
        }
        if (bounds->parsed()) {
            cfg.command = "bounds";
            return cmd_bounds(cfg, out);
        }
        cfg.command = "sweep";
        return cmd_sweep(cfg, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        ordered_json j;
        j["error"] = std::string(e.name());
        j["message"] = e.what();
        err << j.dump() << '\n';
        return 1;
    }
}

} // namespace qclock::cli
