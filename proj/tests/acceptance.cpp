// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "hom/detector_sim.hpp"
#include "hom/fit.hpp"
#include "hom/interference.hpp"
#include "hom/polarization.hpp"
#include "hom/wavepacket.hpp"

namespace fs = std::filesystem;
using namespace hom;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

Outcome exact_outcomes() {
    const auto b2 = two_photon_bs();
    const double boson = coincidence_probability(apply(b2, initial_state(ExchangeSymmetry::Bosonic)));
    const double dist = coincidence_probability(apply(b2, product_state(Port::X, Port::Y)));
    const double fermion = coincidence_probability(apply(b2, initial_state(ExchangeSymmetry::Fermionic)));
    const double err = std::max({std::abs(boson), std::abs(dist - 0.5), std::abs(fermion - 1.0)});
    return {err <= 1e-12, "bosonic " + fmt(boson) + ", distinguishable " + fmt(dist) + ", fermionic " +
                              fmt(fermion) + " (max error " + fmt(err, 2) + ")"};
}

Outcome werner_linearity() {
    const auto b2 = two_photon_bs();
    double worst_pc = 0.0, worst_entry = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const double p = k / 100.0;
        const auto f = conjugate_evolve(werner_state(p), b2);
        worst_pc = std::max(worst_pc, std::abs(coincidence_from_density(f) - (1.0 - p) / 2.0));
        const double outer = (1.0 + p) / 4.0, inner = (1.0 - p) / 4.0;
        // Row-major expected matrix: corners and anti-corners, inner block, zeros elsewhere.
        const double want[4][4] = {{outer, 0, 0, outer}, {0, inner, -inner, 0}, {0, -inner, inner, 0},
                                   {outer, 0, 0, outer}};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) worst_entry = std::max(worst_entry, std::abs(f(i, j) - want[i][j]));
    }
    return {worst_pc <= 1e-12 && worst_entry <= 1e-12,
            "101 p values, max |P_c - (1-p)/2| = " + fmt(worst_pc, 2) + ", max entry error " + fmt(worst_entry, 2)};
}

Outcome coherence_lengths() {
    const double a = coherence_length(810.8, 10.0), b = coherence_length(810.8, 30.0);
    return {std::abs(a - 65.7) <= 0.1 && std::abs(b - 21.9) <= 0.1,
            "10 nm -> " + fmt(a, 5) + " um, 30 nm -> " + fmt(b, 5) + " um"};
}

Outcome overlap_oracle() {
    const double lc = coherence_length(810.8, 10.0);
    double worst = 0.0;
    for (int k = 0; k <= 120; ++k) {
        const double x0 = (-3.0 + 6.0 * k / 120.0) * lc;
        worst = std::max(worst, std::abs(overlap_quadrature(x0, lc) - overlap_closed_form(x0, lc)));
    }
    return {worst <= 1e-8, "121 points on [-3 lc, 3 lc], max |quadrature - closed form| = " + fmt(worst, 2)};
}

Outcome polarization_law() {
    constexpr double pi = std::numbers::pi;
    double worst = 0.0;
    for (int i = 0; i <= 12; ++i) {
        for (int j = 0; j <= 12; ++j) {
            const double theta = pi * i / 12.0, phi = pi * j / 12.0;
            const double c = std::cos(2.0 * phi - 2.0 * theta);
            worst = std::max(worst, std::abs(polarized_coincidence(theta, phi) - 0.5 * (1.0 - c * c)));
        }
    }
    const double at45 = polarized_coincidence(0.3, 0.3 + pi / 4);
    const double atm45 = polarized_coincidence(0.3, 0.3 - pi / 4);
    const double at0 = polarized_coincidence(0.3, 0.3);
    const bool shape = std::abs(at45 - 0.5) <= 1e-10 && std::abs(atm45 - 0.5) <= 1e-10 && std::abs(at0) <= 1e-10;
    return {worst <= 1e-10 && shape, "13x13 grid max error " + fmt(worst, 2) + "; P_c(+-45 deg) = " + fmt(at45, 12) +
                                         ", " + fmt(atm45, 12) + "; P_c(0) = " + fmt(at0, 2)};
}

struct StatsRun {
    std::vector<ScanRecord> scans;
    Outcome outcome;
};

StatsRun fit_recovery() {
    constexpr int kSeeds = 50;
    constexpr double pi = std::numbers::pi;
    const WavepacketSpec filter(810.8, 10.0);
    const auto stage = stage_axis(-200.0, 200.0, StageCalibration{});
    std::vector<double> phi;
    for (int d = -90; d <= 90; d += 5) phi.push_back(d * pi / 180.0);

    StatsRun run;
    DetectorConfig cfg;
    double dip_sum = 0.0, dip_worst = 0.0, pol_worst = 0.0, chi_sum = 0.0;
    int failures = 0;
    for (int k = 0; k < kSeeds; ++k) {
        cfg.rng_seed = 1987 + k;
        auto dip = simulate_dip_scan(stage, filter, 0.93, cfg);
        auto pol = simulate_pol_scan(phi, 0.0, 0.94, cfg);
        const auto fd = fit_dip(dip);
        const auto fp = fit_cosine(pol);
        failures += !fd.converged + !fp.converged;
        dip_sum += fd.value("visibility");
        dip_worst = std::max(dip_worst, std::abs(fd.value("visibility") - 0.93));
        pol_worst = std::max(pol_worst, std::abs(fp.value("visibility") - 0.94));
        chi_sum += fp.reduced_chi_square;
        run.scans.push_back(std::move(dip));
        run.scans.push_back(std::move(pol));
    }
    const double dip_mean = dip_sum / kSeeds, chi_mean = chi_sum / kSeeds;
    const bool pass = failures == 0 && std::abs(dip_mean - 0.93) <= 0.01 && dip_worst <= 0.02 &&
                      pol_worst <= 0.02 && chi_mean >= 0.8 && chi_mean <= 1.2;
    run.outcome = {pass, "50 seeds: dip mean v " + fmt(dip_mean, 5) + " (worst |dv| " + fmt(dip_worst, 3) +
                             "), pol worst |dv| " + fmt(pol_worst, 3) + ", pol mean reduced chi2 " +
                             fmt(chi_mean, 4) + ", non-converged " + std::to_string(failures)};
    return run;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "homsim_acceptance_replay";
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> commands = {
        {"simulate", "--scan", "dip"},
        {"simulate", "--scan", "pol"},
        {"simulate", "--scan", "dip", "--seed", "123456789", "--visibility", "0.5", "--bandwidth", "30"},
        {"simulate", "--scan", "pol", "--seed", "18446744073709551615", "--theta", "12.5", "--phi-step", "1"},
        {"simulate", "--scan", "dip", "--points", "201", "--dark-rate", "250", "--window-ns", "10"},
        {"simulate", "--scan", "dip", "--noiseless"},
    };
    int mismatches = 0, errors = 0;
    std::ostringstream sink;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto first = root / ("run" + std::to_string(i));
        const auto second = root / ("replay" + std::to_string(i));
        auto args = commands[i];
        args.insert(args.end(), {"--out-dir", first.string(), "--name", "scan"});
        errors += hom::cli::run(args, sink, sink) != 0;
        errors += hom::cli::run({"replay", "--manifest", (first / "scan.manifest.json").string(), "--out-dir",
                                 second.string()},
                                sink, sink) != 0;
        for (const char* ext : {".csv", ".json"}) {
            const auto a = slurp(first / (std::string("scan") + ext)), b = slurp(second / (std::string("scan") + ext));
            mismatches += a.empty() || a != b;
        }
    }
    fs::remove_all(root);
    return {mismatches == 0 && errors == 0, std::to_string(commands.size()) + " simulate commands replayed, " +
                                                std::to_string(mismatches) + " byte mismatches, " +
                                                std::to_string(errors) + " command errors"};
}

Outcome statistical_sanity(const std::vector<ScanRecord>& scans) {
    int rejected = 0;
    double min_p = 1.0;
    for (const auto& s : scans) {
        for (const auto* singles : {&s.singles_a, &s.singles_b}) {
            const double p = constancy_test(*singles).p_value;
            min_p = std::min(min_p, p);
            rejected += p < 1e-3;
        }
    }

    struct Case {
        double pc, singles, window_ns, dark, calibration, duration;
    };
    const std::vector<Case> cases = {
        {0.5, 0.0, 40, 0, 1.0, 20},          {0.0, 30000, 40, 0, 7.0 / 144.0, 20},
        {0.25, 30000, 40, 0, 1.0, 10},       {0.035, 30000, 40, 0, 7.0 / 144.0, 40},
        {0.5, 5000, 100, 500, 1.0, 20},      {0.1, 20000, 20, 1000, 0.5, 20},
        {0.4, 50000, 5, 0, 1.0, 10},         {0.0, 60000, 40, 2000, 1.0, 5},
        {0.3, 1000, 1000, 0, 1.0, 20},       {0.45, 30000, 40, 300, 0.25, 20},
    };
    double worst_z = 0.0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        DetectorConfig cfg;
        cfg.singles_rate_per_arm = c.singles;
        cfg.coincidence_window_ns = c.window_ns;
        cfg.dark_rate = c.dark;
        cfg.accidental_calibration = c.calibration;
        cfg.rng_seed = 4242 + i;
        const auto stream = event_stream(c.duration, c.pc, cfg);
        const double z = (static_cast<double>(stream.coincidences) - stream.expected_coincidences) /
                         std::sqrt(std::max(stream.expected_coincidences, 1.0));
        worst_z = std::max(worst_z, std::abs(z));
    }
    return {!scans.empty() && rejected == 0 && worst_z <= 5.0,
            std::to_string(2 * scans.size()) + " singles series, " + std::to_string(rejected) +
                " rejected at 0.1% (min p " + fmt(min_p, 3) + "); " + std::to_string(cases.size()) +
                " event-stream configs, worst |z| " + fmt(worst_z, 3)};
}

Outcome unit_conversion() {
    const double t = delay_from_displacement(5.33);
    return {std::abs(t - 17.8) <= 0.1, "5.33 um -> " + fmt(t, 5) + " fs"};
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << "  " << name << ": " << o.detail << " ["
                  << fmt(secs, 3) << " s]" << std::endl;
    };

    StatsRun stats;
    report(1, "exact interference outcomes", exact_outcomes);
    report(2, "Werner linearity and final density matrix", werner_linearity);
    report(3, "coherence lengths", coherence_lengths);
    report(4, "overlap quadrature oracle", overlap_oracle);
    report(5, "polarization law", polarization_law);
    report(6, "synthetic fit recovery", [&] {
        stats = fit_recovery();
        return stats.outcome;
    });
    report(7, "determinism under manifest replay", determinism);
    report(8, "statistical sanity", [&] { return statistical_sanity(stats.scans); });
    report(9, "displacement to delay", unit_conversion);

    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
