#pragma once

// Monte Carlo count generation for HOM scans.
//
// Counts per point are Poisson with mean
//   ceiling * 2 * P_c + accidentals,
// where the ceiling is the coincidence count at P_c = 1/2 and the accidental
// level comes from S_a * S_b * tau_eff * T with tau_eff = calibration * tau.
// With the default calibration the accidental floor is 7 counts per 4 s
// point. The plain S1*S2*tau estimate at 30000/s singles and a 40 ns window
// would be 144 counts, far above the measured floor; the calibration factor
// carries that discrepancy.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hom/wavepacket.hpp"

namespace hom {

/// Calibration that maps 30000/s singles and a 40 ns window onto an
/// accidental floor of 7 counts per 4 s point.
inline constexpr double kDefaultAccidentalCalibration = 7.0 / 144.0;

struct DetectorConfig {
    double pair_rate = 800.0;              // pairs/s at the beamsplitter
    double singles_rate_per_arm = 30000.0; // counts/s, dark counts excluded
    double coincidence_window_ns = 40.0;
    double integration_time_s = 4.0;
    double dark_rate = 0.0;                // counts/s per detector
    double ceiling_counts = 1150.0;        // coincidences per point at P_c = 1/2
    double accidental_calibration = kDefaultAccidentalCalibration;
    std::uint64_t rng_seed = 1987;

    void validate() const;

    /// Overall pair detection efficiency: ceiling / (pair_rate * T).
    double efficiency() const;
    /// calibration * coincidence window, in seconds.
    double effective_window_s() const;
    /// Total count rate of one detector (singles + dark).
    double detector_rate() const;
    double accidentals_per_point() const;
};

struct StageCalibration {
    int steps_per_point = 4;
    double displacement_per_step_um = 5.33 / 4.0;

    double displacement_per_point_um() const { return steps_per_point * displacement_per_step_um; }
    double steps_to_um(double steps) const { return steps * displacement_per_step_um; }
    double um_to_steps(double um) const { return um / displacement_per_step_um; }
};

enum class AxisKind { StagePositionUm, WaveplateAngleRad };

/// "um" or "rad".
std::string_view axis_unit(AxisKind kind);

struct ScanRecord {
    AxisKind axis_kind = AxisKind::StagePositionUm;
    std::vector<double> axis_values;
    std::vector<std::uint64_t> coincidences;
    std::vector<std::uint64_t> singles_a;
    std::vector<std::uint64_t> singles_b;
    std::vector<double> accidental_estimate;

    // Provenance. config is absent for scans read from CSV.
    std::optional<DetectorConfig> config;
    std::uint64_t seed = 0;
    std::string generator;
    std::map<std::string, double> model_parameters;

    std::size_t size() const { return axis_values.size(); }
    /// Throws std::invalid_argument if the column lengths differ.
    void validate() const;
};

double accidental_rate(double singles_a, double singles_b, double window_s);

/// Mean coincidences per integration time for a coincidence probability
/// 0 <= pc <= 1/2.
double expected_coincidences(double pc, const DetectorConfig& cfg);
double expected_coincidence_rate(double pc, const DetectorConfig& cfg);

struct SimulationOptions {
    /// Replace Poisson draws by the rounded means.
    bool noiseless = false;
};

std::vector<double> linspace(double start, double stop, std::size_t n);

/// Stage positions from start, spaced by the calibration's per-point step,
/// up to and including stop.
std::vector<double> stage_axis(double start_um, double stop_um, const StageCalibration& cal);

/// Dip scan with P_c = (1 - v p(x0)) / 2.
ScanRecord simulate_dip_scan(std::span<const double> positions_um, const WavepacketSpec& wavepacket,
                             double visibility, const DetectorConfig& cfg,
                             SimulationOptions options = {});
ScanRecord simulate_dip_scan(double start_um, double stop_um, std::size_t n_points,
                             const WavepacketSpec& wavepacket, double visibility,
                             const DetectorConfig& cfg, SimulationOptions options = {});

/// Waveplate scan with P_c = (1 - v cos^2(2 phi - 2 theta)) / 2.
ScanRecord simulate_pol_scan(std::span<const double> phi_rad, double theta_rad, double visibility,
                             const DetectorConfig& cfg, SimulationOptions options = {});

enum class Detector { A, B };
enum class EventOrigin { PairSplit, PairBunched, Background };

struct DetectionEvent {
    double time_s;
    Detector detector;
    EventOrigin origin;
};

struct EventStream {
    double duration_s = 0.0;
    std::vector<DetectionEvent> events;  // time ordered
    std::uint64_t coincidences = 0;      // windowed count
    std::uint64_t split_pairs = 0;
    /// expected_coincidence_rate * duration
    double expected_coincidences = 0.0;

    std::uint64_t singles(Detector detector) const;
};

/// Counts (a, b) pairs with |t_a - t_b| <= window / 2; both inputs sorted.
std::uint64_t count_coincidences(std::span<const double> times_a, std::span<const double> times_b,
                                 double window_s);

/// Timestamp-level simulation of one integration of the given duration.
/// Detected pairs arrive at efficiency * pair_rate; a fraction 2 pc split
/// across the detectors, the rest give a single click in one detector.
/// Uncorrelated clicks top each detector up to singles_rate_per_arm, plus
/// dark counts. Coincidences use the effective window.
EventStream event_stream(double duration_s, double pc, const DetectorConfig& cfg);

}  // namespace hom
