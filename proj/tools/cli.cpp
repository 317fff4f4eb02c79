#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "CLI11.hpp"
#include "hom/detector_sim.hpp"
#include "hom/fit.hpp"
#include "hom/polarization.hpp"
#include "hom/scan_io.hpp"
#include "hom/version.hpp"
#include "hom/wavepacket.hpp"

namespace hom::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kDegree = std::numbers::pi / 180.0;
constexpr const char* kOutputDirEnv = "HOMSIM_OUTPUT_DIR";

// Input files or output paths that cannot be used.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Flag name -> value, enough to rebuild the command line.
using Resolved = std::vector<std::pair<std::string, std::string>>;

std::string num(double v) { return format_double(v); }

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f << content;
    if (!f) throw DataError("failed writing " + path.string());
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (!fs::is_directory(p)) throw DataError("cannot create output directory " + p.string());
    return p;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

void write_manifest(const fs::path& path, const std::string& subcommand, const Resolved& options,
                    const nlohmann::json& config, std::uint64_t seed,
                    const std::vector<fs::path>& outputs) {
    nlohmann::json opts = nlohmann::json::object();
    for (const auto& [k, v] : options) opts[k] = v;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& o : outputs) outs.push_back(o.string());
    const nlohmann::json manifest = {{"tool", "homsim"},
                                     {"version", kVersion},
                                     {"subcommand", subcommand},
                                     {"options", opts},
                                     {"config", config},
                                     {"seed", seed},
                                     {"outputs", outs},
                                     {"timestamp", utc_timestamp()}};
    write_file(path, manifest.dump(2) + "\n");
}

void add_detector_options(CLI::App* cmd, DetectorConfig& cfg) {
    cmd->add_option("--pair-rate", cfg.pair_rate, "Photon pairs per second at the beamsplitter")
        ->capture_default_str();
    cmd->add_option("--singles-rate", cfg.singles_rate_per_arm, "Singles per second per detector")
        ->capture_default_str();
    cmd->add_option("--window-ns", cfg.coincidence_window_ns, "Coincidence window (ns)")
        ->capture_default_str();
    cmd->add_option("--integration-time", cfg.integration_time_s, "Seconds per scan point")
        ->capture_default_str();
    cmd->add_option("--dark-rate", cfg.dark_rate, "Dark counts per second per detector")
        ->capture_default_str();
    cmd->add_option("--ceiling", cfg.ceiling_counts, "Coincidences per point at P_c = 1/2")
        ->capture_default_str();
    cmd->add_option("--accidental-calibration", cfg.accidental_calibration,
                    "Scale applied to the coincidence window for accidentals")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.rng_seed, "RNG seed")->capture_default_str();
}

void record_detector_options(Resolved& r, const DetectorConfig& cfg) {
    r.emplace_back("pair-rate", num(cfg.pair_rate));
    r.emplace_back("singles-rate", num(cfg.singles_rate_per_arm));
    r.emplace_back("window-ns", num(cfg.coincidence_window_ns));
    r.emplace_back("integration-time", num(cfg.integration_time_s));
    r.emplace_back("dark-rate", num(cfg.dark_rate));
    r.emplace_back("ceiling", num(cfg.ceiling_counts));
    r.emplace_back("accidental-calibration", num(cfg.accidental_calibration));
    r.emplace_back("seed", std::to_string(cfg.rng_seed));
}

// ---------------------------------------------------------------------------
// probability

struct ProbabilityArgs {
    std::string mode;
    std::size_t points = 0;
    double lc_um = coherence_length(810.8, 10.0);
    double range = 3.0;
    double theta_deg = 0.0;
    std::string method = "closed";
    std::string output;
};

int cmd_probability(const ProbabilityArgs& a, std::ostream& out) {
    std::ostringstream table;
    if (a.mode == "werner") {
        const std::size_t n = a.points ? a.points : 101;
        table << "p,pc\n";
        for (double p : linspace(0.0, 1.0, n)) table << num(p) << ',' << num(werner_coincidence(p)) << '\n';
    } else if (a.mode == "dip") {
        const std::size_t n = a.points ? a.points : 121;
        const auto method = a.method == "quadrature" ? OverlapMethod::Quadrature : OverlapMethod::ClosedForm;
        table << "x0_over_lc,x0_um,pc\n";
        for (double k : linspace(-a.range, a.range, n)) {
            const double x0 = k * a.lc_um;
            table << num(k) << ',' << num(x0) << ',' << num(dip_probability(x0, a.lc_um, method)) << '\n';
        }
    } else {
        const std::size_t n = a.points ? a.points : 181;
        table << "phi_minus_theta_deg,phi_deg,pc\n";
        for (double d : linspace(-90.0, 90.0, n)) {
            const double phi = a.theta_deg + d;
            table << num(d) << ',' << num(phi) << ','
                  << num(polarized_coincidence(a.theta_deg * kDegree, phi * kDegree)) << '\n';
        }
    }
    if (a.output.empty()) {
        out << table.str();
        return kSuccess;
    }
    const fs::path path(a.output);
    if (path.has_parent_path()) prepare_dir(path.parent_path().string());
    write_file(path, table.str());
    Resolved r{{"mode", a.mode},         {"points", std::to_string(a.points)},
               {"lc", num(a.lc_um)},     {"range", num(a.range)},
               {"theta", num(a.theta_deg)}, {"method", a.method},
               {"output", a.output}};
    write_manifest(fs::path(a.output + ".manifest.json"), "probability", r, nullptr, 0, {path});
    out << "wrote " << path.string() << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string scan;
    double wavelength_nm = 810.8;
    double bandwidth_nm = 10.0;
    double visibility = std::numeric_limits<double>::quiet_NaN();
    double start_um = -200.0;
    double stop_um = 200.0;
    std::size_t points = 0;
    int steps_per_point = 4;
    double um_per_step = 5.33 / 4.0;
    double theta_deg = 0.0;
    double phi_start_deg = -90.0;
    double phi_stop_deg = 90.0;
    double phi_step_deg = 5.0;
    bool noiseless = false;
    DetectorConfig cfg;
    std::string out_dir = ".";
    std::string name;
};

int cmd_simulate(SimulateArgs a, std::ostream& out) {
    const bool dip = a.scan == "dip";
    if (std::isnan(a.visibility)) a.visibility = dip ? 0.93 : 0.94;
    if (a.name.empty()) a.name = dip ? "dip_scan" : "pol_scan";
    const SimulationOptions options{a.noiseless};

    ScanRecord scan;
    if (dip) {
        const WavepacketSpec wavepacket(a.wavelength_nm, a.bandwidth_nm);
        std::vector<double> axis;
        if (a.points > 0) {
            if (!(a.stop_um > a.start_um)) throw std::invalid_argument("--stop must exceed --start");
            axis = linspace(a.start_um, a.stop_um, a.points);
        } else {
            axis = stage_axis(a.start_um, a.stop_um, StageCalibration{a.steps_per_point, a.um_per_step});
        }
        scan = simulate_dip_scan(axis, wavepacket, a.visibility, a.cfg, options);
    } else {
        if (!(a.phi_step_deg > 0.0) || !(a.phi_stop_deg > a.phi_start_deg)) {
            throw std::invalid_argument("need --phi-step > 0 and --phi-stop > --phi-start");
        }
        const auto n = static_cast<std::size_t>(
                           std::floor((a.phi_stop_deg - a.phi_start_deg) / a.phi_step_deg + 1e-9)) + 1;
        std::vector<double> phi(n);
        for (std::size_t i = 0; i < n; ++i) {
            phi[i] = (a.phi_start_deg + a.phi_step_deg * static_cast<double>(i)) * kDegree;
        }
        scan = simulate_pol_scan(phi, a.theta_deg * kDegree, a.visibility, a.cfg, options);
    }

    const fs::path dir = prepare_dir(a.out_dir);
    const fs::path csv = dir / (a.name + ".csv");
    const fs::path json = dir / (a.name + ".json");
    std::ostringstream csv_text, json_text;
    write_scan_csv(scan, csv_text);
    write_scan_json(scan, json_text);
    write_file(csv, csv_text.str());
    write_file(json, json_text.str());

    Resolved r{{"scan", a.scan},
               {"wavelength", num(a.wavelength_nm)},
               {"bandwidth", num(a.bandwidth_nm)},
               {"visibility", num(a.visibility)},
               {"start", num(a.start_um)},
               {"stop", num(a.stop_um)},
               {"points", std::to_string(a.points)},
               {"steps-per-point", std::to_string(a.steps_per_point)},
               {"um-per-step", num(a.um_per_step)},
               {"theta", num(a.theta_deg)},
               {"phi-start", num(a.phi_start_deg)},
               {"phi-stop", num(a.phi_stop_deg)},
               {"phi-step", num(a.phi_step_deg)},
               {"noiseless", a.noiseless ? "true" : "false"},
               {"out-dir", a.out_dir},
               {"name", a.name}};
    record_detector_options(r, a.cfg);
    const fs::path manifest = dir / (a.name + ".manifest.json");
    write_manifest(manifest, "simulate", r, config_to_json(a.cfg), a.cfg.rng_seed, {csv, json});

    out << "wrote " << csv.string() << ", " << json.string() << " (" << scan.size()
        << " points, seed " << a.cfg.rng_seed << ")\n"
        << "manifest " << manifest.string() << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    std::string model;
    std::string input;
    std::string output;
    std::string echo_csv;
    std::string out_dir = ".";
    int max_iterations = LeastSquaresOptions{}.max_iterations;
};

void print_parameter(std::ostream& out, const FitResult& fit, const std::string& name,
                     const std::string& label) {
    const auto& p = fit.parameter(name);
    out << "  " << std::left << std::setw(20) << label << std::setprecision(6) << p.value;
    if (std::isfinite(p.uncertainty)) out << " +/- " << p.uncertainty;
    out << '\n';
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    ScanRecord scan;
    FitResult fit;
    try {
        scan = read_scan_file(a.input);
        LeastSquaresOptions options;
        options.max_iterations = a.max_iterations;
        fit = a.model == "dip" ? fit_dip(scan, options) : fit_cosine(scan, options);
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(a.input + ": " + e.what());
    }

    auto j = fit_to_json(fit);
    j["input"] = a.input;
    j["data"] = {{"axis_unit", axis_unit(scan.axis_kind)},
                 {"axis", scan.axis_values},
                 {"coincidences", scan.coincidences},
                 {"singles_a", scan.singles_a},
                 {"singles_b", scan.singles_b},
                 {"accidentals", scan.accidental_estimate}};
    if (fit.model == "dip" && fit.value("visibility") != 0.0) {
        j["fwhm_um"] = fwhm_of_dip(fit.dip_model());
    }

    const fs::path output = a.output.empty()
                                ? prepare_dir(a.out_dir) / (fs::path(a.input).stem().string() + ".fit.json")
                                : fs::path(a.output);
    if (output.has_parent_path()) prepare_dir(output.parent_path().string());
    write_file(output, j.dump(2) + "\n");
    std::vector<fs::path> outputs{output};
    if (!a.echo_csv.empty()) {
        std::ostringstream csv;
        write_scan_csv(scan, csv);
        write_file(a.echo_csv, csv.str());
        outputs.emplace_back(a.echo_csv);
    }
    Resolved r{{"model", a.model}, {"input", a.input}, {"output", output.string()},
               {"echo-csv", a.echo_csv}, {"out-dir", a.out_dir},
               {"max-iterations", std::to_string(a.max_iterations)}};
    write_manifest(fs::path(output.string() + ".manifest.json"), "fit", r, nullptr, scan.seed, outputs);

    out << "model: " << fit.model << '\n'
        << "converged: " << (fit.converged ? "yes" : "no") << " (" << fit.iterations
        << " iterations)\n";
    if (fit.model == "dip") {
        print_parameter(out, fit, "visibility", "visibility");
        print_parameter(out, fit, "width_um", "FWHM (um)");
        print_parameter(out, fit, "center_um", "center (um)");
        print_parameter(out, fit, "baseline", "baseline (counts)");
    } else {
        print_parameter(out, fit, "visibility", "visibility");
        print_parameter(out, fit, "phase_rad", "phase (rad)");
        print_parameter(out, fit, "ceiling", "ceiling (counts)");
    }
    out << "  reduced chi-square  " << std::setprecision(4) << fit.reduced_chi_square << " (dof "
        << fit.degrees_of_freedom << ")\n"
        << "wrote " << output.string() << '\n';
    for (const auto& w : fit.warnings) err << "warning: " << w << '\n';
    return fit.converged ? kSuccess : kNotConverged;
}

// ---------------------------------------------------------------------------
// coherence

int cmd_coherence(double wavelength_nm, double bandwidth_nm, bool as_json, std::ostream& out) {
    const WavepacketSpec spec(wavelength_nm, bandwidth_nm);
    const double lc = spec.coherence_length_um();
    if (as_json) {
        const nlohmann::json j = {{"wavelength_nm", wavelength_nm},
                                  {"bandwidth_nm", bandwidth_nm},
                                  {"coherence_length_um", lc},
                                  {"coherence_time_fs", spec.coherence_time_fs()},
                                  {"energy_bandwidth_ev", spec.energy_bandwidth_ev()},
                                  {"predicted_dip_fwhm_um", dip_fwhm(lc)}};
        out << j.dump(2) << '\n';
        return kSuccess;
    }
    out << std::fixed << std::setprecision(2) << "wavelength:            " << wavelength_nm
        << " nm\n"
        << "bandwidth:             " << bandwidth_nm << " nm\n"
        << "coherence length:      " << lc << " um\n"
        << "coherence time:        " << spec.coherence_time_fs() << " fs\n"
        << std::setprecision(3) << "energy bandwidth:      " << spec.energy_bandwidth_ev() * 1e3
        << " meV\n"
        << std::setprecision(2) << "predicted dip FWHM:    " << dip_fwhm(lc) << " um\n";
    return kSuccess;
}

// ---------------------------------------------------------------------------
// replay

std::vector<std::string> replay_args(const fs::path& manifest_path, const std::string& out_dir) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw DataError("cannot open " + manifest_path.string());
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(manifest_path.string() + ": " + e.what());
    }
    if (!m.contains("subcommand") || !m.contains("options") || !m.at("options").is_object()) {
        throw SchemaError(manifest_path.string() + ": not a homsim manifest");
    }
    const auto sub = m.at("subcommand").get<std::string>();
    if (sub == "replay") throw SchemaError("manifest cannot replay a replay");
    std::vector<std::string> args{sub};
    for (const auto& [key, value] : m.at("options").items()) {
        std::string v = value.get<std::string>();
        if (key == "out-dir" && !out_dir.empty()) v = out_dir;
        if (v.empty()) continue;
        args.push_back("--" + key + "=" + v);
    }
    return args;
}

int map_parse_error(const CLI::App& app, const CLI::ParseError& e, std::ostream& out,
                    std::ostream& err) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hong-Ou-Mandel interference simulation and analysis", "homsim"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "Read option defaults from a key = value file");
    app.require_subcommand(1);

    ProbabilityArgs prob;
    auto* probability = app.add_subcommand("probability", "Tabulate model coincidence probabilities");
    probability->add_option("--mode", prob.mode, "werner | dip | polarization")
        ->required()
        ->check(CLI::IsMember({"werner", "dip", "polarization"}));
    probability->add_option("--points", prob.points, "Grid size (0 picks the mode default)");
    probability->add_option("--lc", prob.lc_um, "Coherence length (um) for dip mode")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    probability->add_option("--range", prob.range, "Dip mode spans x0/lc in [-range, range]")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    probability->add_option("--theta", prob.theta_deg, "Arm-x waveplate angle (deg)")
        ->capture_default_str();
    probability->add_option("--method", prob.method, "Overlap evaluation: closed | quadrature")
        ->capture_default_str()
        ->check(CLI::IsMember({"closed", "quadrature"}));
    probability->add_option("--output", prob.output, "CSV path (default: standard output)");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic coincidence scan");
    simulate->add_option("--scan", sim.scan, "dip | pol")->required()->check(CLI::IsMember({"dip", "pol"}));
    simulate->add_option("--wavelength", sim.wavelength_nm, "Center wavelength (nm)")->capture_default_str();
    simulate->add_option("--bandwidth", sim.bandwidth_nm, "Filter bandwidth FWHM (nm)")->capture_default_str();
    simulate->add_option("--visibility", sim.visibility, "Visibility (default 0.93 dip, 0.94 pol)");
    simulate->add_option("--start", sim.start_um, "Dip scan start (um)")->capture_default_str();
    simulate->add_option("--stop", sim.stop_um, "Dip scan stop (um)")->capture_default_str();
    simulate->add_option("--points", sim.points, "Dip points, evenly spaced (0 uses the stage step)");
    simulate->add_option("--steps-per-point", sim.steps_per_point, "Stepper steps per point")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--um-per-step", sim.um_per_step, "Stage displacement per step (um)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--theta", sim.theta_deg, "Fixed waveplate angle (deg)")->capture_default_str();
    simulate->add_option("--phi-start", sim.phi_start_deg, "Scanned waveplate start (deg)")->capture_default_str();
    simulate->add_option("--phi-stop", sim.phi_stop_deg, "Scanned waveplate stop (deg)")->capture_default_str();
    simulate->add_option("--phi-step", sim.phi_step_deg, "Scanned waveplate step (deg)")->capture_default_str();
    simulate->add_flag("--noiseless", sim.noiseless, "Write rounded means instead of Poisson draws");
    add_detector_options(simulate, sim.cfg);
    simulate->add_option("--out-dir", sim.out_dir, "Output directory")
        ->envname(kOutputDirEnv)
        ->capture_default_str();
    simulate->add_option("--name", sim.name, "Output file stem (default dip_scan or pol_scan)");

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Fit a scan file");
    fit->add_option("--model", fa.model, "dip | cosine")->required()->check(CLI::IsMember({"dip", "cosine"}));
    fit->add_option("--input", fa.input, "Scan CSV or JSON")->required();
    fit->add_option("--output", fa.output, "FitResult JSON path");
    fit->add_option("--echo-csv", fa.echo_csv, "Re-emit the parsed data as CSV");
    fit->add_option("--max-iterations", fa.max_iterations, "Iteration cap for the optimizer")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    fit->add_option("--out-dir", fa.out_dir, "Directory for the default output path")
        ->envname(kOutputDirEnv)
        ->capture_default_str();

    double wavelength = 810.8, bandwidth = 10.0;
    bool coherence_json = false;
    auto* coherence = app.add_subcommand("coherence", "Coherence length and predicted dip width");
    coherence->add_option("--wavelength", wavelength, "Center wavelength (nm)")->capture_default_str();
    coherence->add_option("--bandwidth", bandwidth, "Filter bandwidth FWHM (nm)")->capture_default_str();
    coherence->add_flag("--json", coherence_json, "Print JSON");

    std::string manifest_path, replay_dir;
    auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay->add_option("--manifest", manifest_path, "Manifest JSON")->required();
    replay->add_option("--out-dir", replay_dir, "Write outputs here instead");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return map_parse_error(app, e, out, err);
    }

    try {
        if (*probability) return cmd_probability(prob, out);
        if (*simulate) return cmd_simulate(sim, out);
        if (*fit) return cmd_fit(fa, out, err);
        if (*coherence) return cmd_coherence(wavelength, bandwidth, coherence_json, out);
        if (*replay) return run(replay_args(manifest_path, replay_dir), out, err);
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kUsageError;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsageError;
}

}  // namespace hom::cli
