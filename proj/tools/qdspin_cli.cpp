// Command-line front end for the spin-initialization simulator.
//
// Subcommands:
//   steady     stationary density matrix and fidelity for one rate set
//   evolve     populations of the five levels over time, CSV
//   init-time  first crossing of the initialization threshold
//   sweep      fidelity / initialization time over a drive-decay grid
//   rabi       two-photon drive strength from cavity and dot parameters
//
// Every subcommand accepts --config FILE with flat key=value lines; keys
// are the long option names without the leading dashes. Command-line
// options override config values.
//
// Exit codes: 0 success (including UNREACHABLE verdicts), 1 usage or
// argument errors, 2 numerical failures, 3 I/O failures.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qdspin/qdspin.hpp"

namespace {

using qdspin::model::RateSet;

struct RateFlags {
    double omega_ghz = 0.5;
    double gamma15_ghz = 10.0;
    double gamma12_khz = 10.0;
    double gamma25_khz = 100.0;
    double gamma_p_ghz = 8.0;

    RateSet to_rates() const {
        RateSet r;
        r.omega_ghz = omega_ghz;
        r.gamma15_ghz = gamma15_ghz;
        r.gamma12_ghz = gamma12_khz * 1e-6;
        r.gamma25_ghz = gamma25_khz * 1e-6;
        r.gamma35_ghz = gamma_p_ghz;
        r.gamma45_ghz = gamma_p_ghz;
        return r;
    }
};

void add_background_rate_options(CLI::App* sub, RateFlags& f) {
    sub->add_option("--gamma12-khz", f.gamma12_khz,
                    "ground-state spin flip rate, total over both directions (kHz)")
        ->capture_default_str();
    sub->add_option("--gamma25-khz", f.gamma25_khz, "residual relay decay into spin down (kHz)")
        ->capture_default_str();
    sub->add_option("--gamma-p-ghz", f.gamma_p_ghz, "trion relaxation into the relay (GHz)")
        ->capture_default_str();
}

void add_point_rate_options(CLI::App* sub, RateFlags& f) {
    sub->add_option("--omega-ghz", f.omega_ghz, "two-photon drive strength Omega/2pi (GHz)")
        ->capture_default_str();
    sub->add_option("--gamma-ghz", f.gamma15_ghz, "enhanced relay decay into spin up (GHz)")
        ->capture_default_str();
    add_background_rate_options(sub, f);
}

std::string config_sink; // value is re-read during pre-parse expansion

void add_config_option(CLI::App* sub) {
    sub->add_option("--config", config_sink,
                    "flat key=value file; keys are long option names without leading dashes");
}

// Flat key=value lines, # starts a comment, blank lines ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw qdspin::sweep::IoError("config: cannot read " + path);
    }
    auto trim = [](const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string key = eq == std::string::npos ? std::string() : trim(line.substr(0, eq));
        if (key.empty()) {
            throw std::invalid_argument("config: " + path + ": line " + std::to_string(lineno) +
                                        " is not a key=value pair");
        }
        kv.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return kv;
}

// Expands --config FILE into the equivalent long options, appended so the
// parser sees them; keys whose option already appears on the command line
// are skipped, which is what gives explicit options precedence.
void expand_config(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty()) return;

    auto given = [&args](const std::string& flag) {
        for (const std::string& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        }
        return false;
    };
    for (const auto& [key, value] : read_config_file(path)) {
        if (key == "config") {
            throw std::invalid_argument("config: files cannot chain further config files");
        }
        const std::string flag = "--" + key;
        if (given(flag)) continue;
        args.push_back(flag);
        args.push_back(value);
    }
}

std::string g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// grid spec: "omega:MIN:MAX:COUNT:lin|log,gamma:MIN:MAX:COUNT:lin|log"
// (either axis may be omitted and keeps its default)
qdspin::sweep::SweepGrid parse_grid(const std::string& spec, const RateSet& fixed) {
    qdspin::sweep::SweepGrid grid;
    grid.fixed_rates = fixed;
    if (spec.empty()) return grid;

    std::vector<std::string> parts;
    std::string cur;
    for (const char c : spec) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);

    for (const std::string& part : parts) {
        std::vector<std::string> f;
        std::string tok;
        for (const char c : part) {
            if (c == ':') {
                f.push_back(tok);
                tok.clear();
            } else {
                tok += c;
            }
        }
        f.push_back(tok);
        if (f.size() != 5) {
            throw std::invalid_argument("grid axis '" + part +
                                        "' is not NAME:MIN:MAX:COUNT:lin|log");
        }
        qdspin::sweep::AxisSpec axis;
        try {
            axis.min_ghz = std::stod(f[1]);
            axis.max_ghz = std::stod(f[2]);
            const long long n = std::stoll(f[3]);
            if (n < 1) throw std::invalid_argument("count");
            axis.count = static_cast<std::size_t>(n);
        } catch (const std::exception&) {
            throw std::invalid_argument("grid axis '" + part + "' has malformed numbers");
        }
        if (f[4] == "lin") {
            axis.spacing = qdspin::sweep::Spacing::linear;
        } else if (f[4] == "log") {
            axis.spacing = qdspin::sweep::Spacing::logarithmic;
        } else {
            throw std::invalid_argument("grid axis '" + part + "' spacing must be lin or log");
        }
        axis.validate();
        if (f[0] == "omega") {
            grid.omega_axis = axis;
        } else if (f[0] == "gamma") {
            grid.gamma_axis = axis;
        } else {
            throw std::invalid_argument("grid axis name '" + f[0] + "' must be omega or gamma");
        }
    }
    return grid;
}

int run_steady(const RateFlags& flags) {
    const RateSet rates = flags.to_rates();
    const auto rho = qdspin::dynamics::steady_state(qdspin::model::build_liouvillian(rates));
    std::cout << "# steady state, level order: up, down, trion_from_down, trion_from_up, relay\n";
    const auto& m = rho.matrix();
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%+12.5e%+12.5ej", m(i, j).real(), m(i, j).imag());
            std::cout << (j == 0 ? "" : "  ") << buf;
        }
        std::cout << '\n';
    }
    std::cout << "fidelity = " << g9(rho.population(qdspin::model::Level::spin_up)) << '\n';
    return 0;
}

int run_evolve(const RateFlags& flags, double t_max_ns, long long samples,
               const std::string& out_path) {
    if (samples < 2) {
        throw std::invalid_argument("--samples must be at least 2");
    }
    if (!(t_max_ns > 0.0)) {
        throw std::invalid_argument("--t-max-ns must be positive");
    }
    const RateSet rates = flags.to_rates();
    const auto liou = qdspin::model::build_liouvillian(rates);
    const auto rho0 = qdspin::model::DensityMatrix::equal_spin_mixture();

    std::string out = "t_ns,p_up,p_down,p_trion_from_down,p_trion_from_up,p_relay\n";
    for (long long k = 0; k < samples; ++k) {
        const double t = t_max_ns * static_cast<double>(k) / static_cast<double>(samples - 1);
        const auto rho = qdspin::dynamics::evolve(liou, rho0, t);
        out += g9(t);
        for (int lvl = 0; lvl < qdspin::model::level_count; ++lvl) {
            out += ',';
            out += g9(rho.population(static_cast<qdspin::model::Level>(lvl)));
        }
        out += '\n';
    }

    if (out_path.empty() || out_path == "-") {
        std::cout << out;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw qdspin::sweep::IoError("cannot open " + out_path + " for writing");
        f << out;
        f.flush();
        if (!f) throw qdspin::sweep::IoError("write to " + out_path + " failed");
    }
    return 0;
}

int run_init_time(const RateFlags& flags, double threshold, double time_tol_ns) {
    const RateSet rates = flags.to_rates();
    const auto result = qdspin::dynamics::init_time(rates, threshold, time_tol_ns);
    if (!result.reachable()) {
        std::cout << "UNREACHABLE: steady-state fidelity " << g9(result.steady_fidelity())
                  << " is below threshold " << g9(threshold) << '\n';
        return 0;
    }
    std::cout << "t_init_ns = " << g9(result.time_ns()) << '\n';
    if (result.time_ns() > 0.0) {
        std::cout << "speed_ghz = " << g9(qdspin::dynamics::speed_from_time(result.time_ns()))
                  << '\n';
    }
    return 0;
}

int run_sweep(const RateFlags& flags, const std::string& grid_spec, unsigned threads,
              const std::string& out_path, const std::string& svg_path,
              qdspin::svg::Metric metric) {
    RateSet fixed = flags.to_rates();
    const auto grid = parse_grid(grid_spec, fixed);
    const auto records = qdspin::sweep::run_sweep(grid, threads);

    if (out_path.empty() || out_path == "-") {
        qdspin::sweep::write_csv(records, std::cout);
    } else {
        qdspin::sweep::write_csv(records, std::filesystem::path(out_path));
    }
    if (!svg_path.empty()) {
        qdspin::svg::write_svg(records, metric, svg_path);
    }

    const auto ext = qdspin::sweep::find_extrema(records);
    std::cerr << "# max fidelity " << g9(ext.max_fidelity.fidelity) << " at omega="
              << g9(ext.max_fidelity.omega_ghz) << " GHz, gamma15="
              << g9(ext.max_fidelity.gamma_ghz) << " GHz\n";
    if (ext.min_time) {
        std::cerr << "# min t_init " << g9(*ext.min_time->t_init_ns) << " ns (speed "
                  << g9(*ext.min_time->speed_ghz) << " GHz) at omega="
                  << g9(ext.min_time->omega_ghz) << " GHz, gamma15="
                  << g9(ext.min_time->gamma_ghz) << " GHz\n";
    } else {
        std::cerr << "# threshold unreachable everywhere on the grid\n";
    }
    return 0;
}

struct RabiFlags {
    double eta = 0.02;
    double power_uw = 50.0;
    double q = 5000.0;
    double refractive_index = 3.4;
    double lambda_cavity_nm = 1800.0;
    double lambda_laser_nm = 1800.0;
    double mode_volume_um3 = 0.0; // derived from the cavity when not given
    double r_cv_nm = 0.6;
    double m_e_eff = 0.07;
    double m_h_eff = 0.34;
    double hbar_omega_e_mev = 50.0;
    double hbar_omega_h_mev = 25.0;
    double lambda_trion_nm = 930.0;
    double field_ratio = 1.0;
    double alignment = 1.0;
};

int run_rabi(const RabiFlags& f, bool volume_given) {
    namespace rabi = qdspin::rabi;
    rabi::CavityParams cavity;
    cavity.eta = f.eta;
    cavity.power_w = f.power_uw * 1e-6;
    cavity.quality_factor = f.q;
    cavity.refractive_index = f.refractive_index;
    cavity.lambda_cavity_m = f.lambda_cavity_nm * 1e-9;
    cavity.lambda_laser_m = f.lambda_laser_nm * 1e-9;
    cavity.mode_volume_m3 = volume_given ? f.mode_volume_um3 * 1e-18
                                         : rabi::cubed(cavity.lambda_cavity_m / f.refractive_index);

    rabi::DotParams dot;
    dot.r_cv_m = f.r_cv_nm * 1e-9;
    dot.m_e_eff_kg = f.m_e_eff * rabi::constants::electron_mass_kg;
    dot.m_h_eff_kg = f.m_h_eff * rabi::constants::electron_mass_kg;
    dot.hbar_omega_e_j = f.hbar_omega_e_mev * 1e-3 * rabi::constants::joule_per_ev;
    dot.hbar_omega_h_j = f.hbar_omega_h_mev * 1e-3 * rabi::constants::joule_per_ev;
    dot.lambda_trion_m = f.lambda_trion_nm * 1e-9;

    rabi::TwoPhotonOverlaps overlaps;
    const rabi::OverlapFactors leg{f.field_ratio, f.alignment};
    overlaps.electron_path = {leg, leg};
    overlaps.hole_path = {leg, leg};

    const double c = rabi::constants::speed_of_light_m_s;
    const double two_pi = 2.0 * std::numbers::pi;
    const double omega_laser = two_pi * c / cavity.lambda_laser_m;
    const double omega_cavity = two_pi * c / cavity.lambda_cavity_m;
    const double phi = rabi::spectral_mismatch(omega_laser, omega_cavity, cavity.quality_factor);
    const double l_e = rabi::oscillator_length(dot.m_e_eff_kg, dot.hbar_omega_e_j);
    const double l_h = rabi::oscillator_length(dot.m_h_eff_kg, dot.hbar_omega_h_j);
    const double d_el = rabi::intermediate_detuning(dot.lambda_trion_m, cavity.lambda_laser_m);
    const double d_ho = rabi::detuning_from_energy(dot.hbar_omega_h_j, cavity.lambda_laser_m);

    const double omega_ghz = rabi::two_photon_rabi(cavity, dot, overlaps);

    std::cout << "phi = " << g9(phi) << '\n';
    std::cout << "l_e_nm = " << g9(l_e * 1e9) << '\n';
    std::cout << "l_h_nm = " << g9(l_h * 1e9) << '\n';
    std::cout << "mode_volume_um3 = " << g9(cavity.mode_volume_m3 * 1e18) << '\n';
    std::cout << "delta_electron_path_thz = " << g9(d_el / two_pi / 1e12) << '\n';
    std::cout << "delta_hole_path_thz = " << g9(d_ho / two_pi / 1e12) << '\n';
    std::cout << "omega_two_photon_ghz = " << g9(omega_ghz) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-dot spin initialization in a doubly resonant cavity"};
    app.require_subcommand(1);

    RateFlags steady_flags;
    CLI::App* steady = app.add_subcommand("steady", "stationary state and fidelity");
    add_point_rate_options(steady, steady_flags);
    add_config_option(steady);

    RateFlags evolve_flags;
    double t_max_ns = 2.0;
    long long samples = 51;
    std::string evolve_out;
    CLI::App* evolve = app.add_subcommand("evolve", "level populations over time, CSV");
    add_point_rate_options(evolve, evolve_flags);
    evolve->add_option("--t-max-ns", t_max_ns, "final time (ns)")->capture_default_str();
    evolve->add_option("--samples", samples, "number of rows including t=0")->capture_default_str();
    evolve->add_option("--out", evolve_out, "output file (default stdout)");
    add_config_option(evolve);

    RateFlags it_flags;
    double threshold = qdspin::dynamics::default_threshold;
    double time_tol_ns = 1e-4;
    CLI::App* init_time = app.add_subcommand("init-time", "first threshold crossing");
    add_point_rate_options(init_time, it_flags);
    init_time->add_option("--threshold", threshold, "spin-up population threshold")
        ->capture_default_str();
    init_time->add_option("--time-tol-ns", time_tol_ns, "bisection width on the crossing (ns)")
        ->capture_default_str();
    add_config_option(init_time);

    RateFlags sweep_flags;
    std::string grid_spec;
    unsigned threads = 0;
    std::string sweep_out;
    std::string svg_path;
    qdspin::svg::Metric svg_metric = qdspin::svg::Metric::fidelity;
    CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over drive and decay, CSV output");
    add_background_rate_options(sweep, sweep_flags);
    sweep->add_option("--grid", grid_spec,
                      "omega:MIN:MAX:COUNT:lin|log,gamma:MIN:MAX:COUNT:lin|log "
                      "(default omega:0.01:5:60:log,gamma:5:20:31:lin)");
    sweep->add_option("--threads", threads, "worker threads, 0 = hardware")->capture_default_str();
    sweep->add_option("--out", sweep_out, "CSV output file (default stdout)");
    sweep->add_option("--svg", svg_path, "also render an SVG heatmap to this file");
    const std::map<std::string, qdspin::svg::Metric> metric_names{
        {"fidelity", qdspin::svg::Metric::fidelity},
        {"init-time", qdspin::svg::Metric::init_time},
        {"speed", qdspin::svg::Metric::speed}};
    sweep->add_option("--svg-metric", svg_metric, "heatmap quantity")
        ->transform(CLI::CheckedTransformer(metric_names, CLI::ignore_case))
        ->capture_default_str();
    add_config_option(sweep);

    RabiFlags rabi_flags;
    CLI::App* rabi = app.add_subcommand("rabi", "two-photon drive strength from device parameters");
    rabi->add_option("--eta", rabi_flags.eta, "input coupling efficiency")->capture_default_str();
    rabi->add_option("--power-uw", rabi_flags.power_uw, "drive power (uW)")->capture_default_str();
    rabi->add_option("--q", rabi_flags.q, "cavity quality factor")->capture_default_str();
    rabi->add_option("--refractive-index", rabi_flags.refractive_index, "host refractive index")
        ->capture_default_str();
    rabi->add_option("--lambda-cavity-nm", rabi_flags.lambda_cavity_nm, "cavity resonance (nm)")
        ->capture_default_str();
    rabi->add_option("--lambda-laser-nm", rabi_flags.lambda_laser_nm, "drive wavelength (nm)")
        ->capture_default_str();
    CLI::Option* vol_opt =
        rabi->add_option("--mode-volume-um3", rabi_flags.mode_volume_um3,
                         "mode volume (um^3, default (lambda_cavity/n)^3)");
    rabi->add_option("--r-cv-nm", rabi_flags.r_cv_nm, "interband dipole length (nm)")
        ->capture_default_str();
    rabi->add_option("--m-e-eff", rabi_flags.m_e_eff, "electron effective mass (units of m0)")
        ->capture_default_str();
    rabi->add_option("--m-h-eff", rabi_flags.m_h_eff, "hole effective mass (units of m0)")
        ->capture_default_str();
    rabi->add_option("--hbar-omega-e-mev", rabi_flags.hbar_omega_e_mev,
                     "electron confinement quantum (meV)")
        ->capture_default_str();
    rabi->add_option("--hbar-omega-h-mev", rabi_flags.hbar_omega_h_mev,
                     "hole confinement quantum (meV)")
        ->capture_default_str();
    rabi->add_option("--lambda-trion-nm", rabi_flags.lambda_trion_nm, "trion transition (nm)")
        ->capture_default_str();
    rabi->add_option("--field-ratio", rabi_flags.field_ratio, "mode field at the dot, relative")
        ->capture_default_str();
    rabi->add_option("--alignment", rabi_flags.alignment, "polarization alignment")
        ->capture_default_str();
    add_config_option(rabi);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        expand_config(args);
    } catch (const qdspin::sweep::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::reverse(args.begin(), args.end()); // the vector overload consumes from the back

    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help or the parse error
        return code == 0 ? 0 : 1;    // fold CLI11's error-code zoo into 1
    }

    try {
        if (steady->parsed()) return run_steady(steady_flags);
        if (evolve->parsed()) return run_evolve(evolve_flags, t_max_ns, samples, evolve_out);
        if (init_time->parsed()) return run_init_time(it_flags, threshold, time_tol_ns);
        if (sweep->parsed())
            return run_sweep(sweep_flags, grid_spec, threads, sweep_out, svg_path, svg_metric);
        if (rabi->parsed()) return run_rabi(rabi_flags, static_cast<bool>(vol_opt->count()));
        std::cerr << "error: no subcommand given\n";
        return 1;
    } catch (const qdspin::sweep::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    }
}
