#include "hom/detector_sim.hpp"

#include <algorithm>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <cmath>
#include <stdexcept>

#include "hom/polarization.hpp"
#include "hom/rng.hpp"

namespace hom {
namespace {

// Substream reserved for event streams; scan points use their index.
constexpr std::uint64_t kEventStreamId = 0xE7E7'0000'0000'0001ULL;

void require_nonnegative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string("DetectorConfig: ") + name +
                                    " must be finite and non-negative");
    }
}

void require_visibility(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("visibility must lie in [0, 1]");
}

std::uint64_t draw(Engine& engine, double mean, bool noiseless) {
    if (noiseless) return static_cast<std::uint64_t>(std::llround(mean));
    return sample_poisson(engine, mean);
}

// Fills one point: coincidences, then singles a, then singles b.
void fill_point(ScanRecord& record, std::size_t index, double pc, const DetectorConfig& cfg,
                const SimulationOptions& options) {
    auto engine = make_engine(cfg.rng_seed, index);
    const double singles_mean = cfg.detector_rate() * cfg.integration_time_s;
    record.coincidences[index] = draw(engine, expected_coincidences(pc, cfg), options.noiseless);
    record.singles_a[index] = draw(engine, singles_mean, options.noiseless);
    record.singles_b[index] = draw(engine, singles_mean, options.noiseless);
    record.accidental_estimate[index] = cfg.accidentals_per_point();
}

ScanRecord empty_record(AxisKind kind, std::span<const double> axis, const DetectorConfig& cfg) {
    ScanRecord record;
    record.axis_kind = kind;
    record.axis_values.assign(axis.begin(), axis.end());
    const std::size_t n = axis.size();
    record.coincidences.resize(n);
    record.singles_a.resize(n);
    record.singles_b.resize(n);
    record.accidental_estimate.resize(n);
    record.config = cfg;
    record.seed = cfg.rng_seed;
    return record;
}

std::vector<double> poisson_times(Engine& engine, double rate, double duration) {
    std::vector<double> times;
    if (rate <= 0.0) return times;
    boost::random::exponential_distribution<double> gap(rate);
    for (double t = gap(engine); t < duration; t += gap(engine)) times.push_back(t);
    return times;
}

}  // namespace

// ---------------------------------------------------------------------------
// DetectorConfig

void DetectorConfig::validate() const {
    require_nonnegative(pair_rate, "pair_rate");
    require_nonnegative(singles_rate_per_arm, "singles_rate_per_arm");
    require_nonnegative(dark_rate, "dark_rate");
    require_nonnegative(ceiling_counts, "ceiling_counts");
    require_nonnegative(accidental_calibration, "accidental_calibration");
    if (!(coincidence_window_ns > 0.0) || !std::isfinite(coincidence_window_ns)) {
        throw std::invalid_argument("DetectorConfig: coincidence_window_ns must be positive");
    }
    if (!(integration_time_s > 0.0) || !std::isfinite(integration_time_s)) {
        throw std::invalid_argument("DetectorConfig: integration_time_s must be positive");
    }
    if (ceiling_counts > 0.0 && pair_rate * integration_time_s < ceiling_counts) {
        throw std::invalid_argument(
            "DetectorConfig: ceiling_counts exceeds the pair flux pair_rate * integration_time_s");
    }
}

double DetectorConfig::efficiency() const {
    if (ceiling_counts == 0.0) return 0.0;
    return ceiling_counts / (pair_rate * integration_time_s);
}

double DetectorConfig::effective_window_s() const {
    return accidental_calibration * coincidence_window_ns * 1e-9;
}

double DetectorConfig::detector_rate() const { return singles_rate_per_arm + dark_rate; }

double DetectorConfig::accidentals_per_point() const {
    return accidental_rate(detector_rate(), detector_rate(), effective_window_s()) *
           integration_time_s;
}

std::string_view axis_unit(AxisKind kind) {
    return kind == AxisKind::StagePositionUm ? "um" : "rad";
}

void ScanRecord::validate() const {
    const std::size_t n = axis_values.size();
    if (coincidences.size() != n || singles_a.size() != n || singles_b.size() != n ||
        accidental_estimate.size() != n) {
        throw std::invalid_argument("ScanRecord: column lengths differ");
    }
}

// ---------------------------------------------------------------------------
// Closed-form rates

double accidental_rate(double singles_a, double singles_b, double window_s) {
    if (singles_a < 0.0 || singles_b < 0.0 || window_s < 0.0) {
        throw std::domain_error("accidental_rate: inputs must be non-negative");
    }
    return singles_a * singles_b * window_s;
}

double expected_coincidence_rate(double pc, const DetectorConfig& cfg) {
    if (!(pc >= 0.0 && pc <= 0.5)) {
        throw std::domain_error("expected_coincidences: pc must lie in [0, 1/2]");
    }
    cfg.validate();
    const double true_rate = cfg.pair_rate * 2.0 * pc * cfg.efficiency();
    return true_rate + accidental_rate(cfg.detector_rate(), cfg.detector_rate(),
                                       cfg.effective_window_s());
}

double expected_coincidences(double pc, const DetectorConfig& cfg) {
    return expected_coincidence_rate(pc, cfg) * cfg.integration_time_s;
}

// ---------------------------------------------------------------------------
// Scans

std::vector<double> linspace(double start, double stop, std::size_t n) {
    if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
    std::vector<double> out(n);
    const double step = (stop - start) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = start + step * static_cast<double>(i);
    out.back() = stop;
    return out;
}

std::vector<double> stage_axis(double start_um, double stop_um, const StageCalibration& cal) {
    const double step = cal.displacement_per_point_um();
    if (!(step > 0.0)) throw std::invalid_argument("stage_axis: non-positive step");
    if (!(stop_um > start_um)) throw std::invalid_argument("stage_axis: stop must exceed start");
    const auto n = static_cast<std::size_t>(std::floor((stop_um - start_um) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = start_um + step * static_cast<double>(i);
    return out;
}

ScanRecord simulate_dip_scan(std::span<const double> positions_um, const WavepacketSpec& wavepacket,
                             double visibility, const DetectorConfig& cfg,
                             SimulationOptions options) {
    if (positions_um.size() < 2) throw std::invalid_argument("simulate_dip_scan: need >= 2 points");
    require_visibility(visibility);
    cfg.validate();
    const double lc = wavepacket.coherence_length_um();
    auto record = empty_record(AxisKind::StagePositionUm, positions_um, cfg);
    record.generator = "dip";
    record.model_parameters = {{"visibility", visibility},
                               {"center_wavelength_nm", wavepacket.center_wavelength_nm()},
                               {"bandwidth_nm", wavepacket.bandwidth_fwhm_nm()},
                               {"coherence_length_um", lc},
                               {"dip_fwhm_um", dip_fwhm(lc)}};
    for (std::size_t i = 0; i < positions_um.size(); ++i) {
        // Visibility scales the Werner weight: P_c = (1 - v p) / 2.
        const double p = overlap_closed_form(positions_um[i], lc);
        fill_point(record, i, werner_coincidence(visibility * p), cfg, options);
    }
    return record;
}

ScanRecord simulate_dip_scan(double start_um, double stop_um, std::size_t n_points,
                             const WavepacketSpec& wavepacket, double visibility,
                             const DetectorConfig& cfg, SimulationOptions options) {
    if (!(stop_um > start_um)) throw std::invalid_argument("simulate_dip_scan: invalid range");
    const auto axis = linspace(start_um, stop_um, n_points);
    return simulate_dip_scan(axis, wavepacket, visibility, cfg, options);
}

ScanRecord simulate_pol_scan(std::span<const double> phi_rad, double theta_rad, double visibility,
                             const DetectorConfig& cfg, SimulationOptions options) {
    if (phi_rad.size() < 2) throw std::invalid_argument("simulate_pol_scan: need >= 2 points");
    require_visibility(visibility);
    if (!std::isfinite(theta_rad)) throw std::invalid_argument("simulate_pol_scan: bad theta");
    cfg.validate();
    auto record = empty_record(AxisKind::WaveplateAngleRad, phi_rad, cfg);
    record.generator = "pol";
    record.model_parameters = {{"visibility", visibility}, {"theta_rad", theta_rad}};
    for (std::size_t i = 0; i < phi_rad.size(); ++i) {
        if (!std::isfinite(phi_rad[i])) throw std::invalid_argument("simulate_pol_scan: bad phi");
        // The 16-dim pipeline gives (1 - cos^2) / 2; recover cos^2 and apply v.
        const double ideal = polarized_coincidence(theta_rad, phi_rad[i]);
        const double cos2 = std::clamp(1.0 - 2.0 * ideal, 0.0, 1.0);
        fill_point(record, i, 0.5 * (1.0 - visibility * cos2), cfg, options);
    }
    return record;
}

// ---------------------------------------------------------------------------
// Event streams

std::uint64_t EventStream::singles(Detector detector) const {
    return static_cast<std::uint64_t>(std::count_if(
        events.begin(), events.end(), [&](const auto& e) { return e.detector == detector; }));
}

std::uint64_t count_coincidences(std::span<const double> times_a, std::span<const double> times_b,
                                 double window_s) {
    const double half = 0.5 * window_s;
    std::uint64_t count = 0;
    std::size_t lo = 0, hi = 0;
    for (double t : times_a) {
        while (lo < times_b.size() && times_b[lo] < t - half) ++lo;
        if (hi < lo) hi = lo;
        while (hi < times_b.size() && times_b[hi] <= t + half) ++hi;
        count += hi - lo;
    }
    return count;
}

EventStream event_stream(double duration_s, double pc, const DetectorConfig& cfg) {
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw std::invalid_argument("event_stream: duration must be positive");
    }
    EventStream stream;
    stream.duration_s = duration_s;
    stream.expected_coincidences = expected_coincidence_rate(pc, cfg) * duration_s;

    auto engine = make_engine(cfg.rng_seed, kEventStreamId);
    const double detected_pair_rate = cfg.efficiency() * cfg.pair_rate;

    std::vector<DetectionEvent> events;
    boost::random::bernoulli_distribution<double> splits(2.0 * pc);
    boost::random::bernoulli_distribution<double> goes_to_a(0.5);
    for (double t : poisson_times(engine, detected_pair_rate, duration_s)) {
        if (splits(engine)) {
            events.push_back({t, Detector::A, EventOrigin::PairSplit});
            events.push_back({t, Detector::B, EventOrigin::PairSplit});
            ++stream.split_pairs;
        } else {
            events.push_back(
                {t, goes_to_a(engine) ? Detector::A : Detector::B, EventOrigin::PairBunched});
        }
    }
    // A pair puts a click in a given detector with probability 1/2 + pc.
    const double pair_clicks = detected_pair_rate * (0.5 + pc);
    const double background = std::max(0.0, cfg.singles_rate_per_arm - pair_clicks) + cfg.dark_rate;
    for (Detector d : {Detector::A, Detector::B}) {
        for (double t : poisson_times(engine, background, duration_s)) {
            events.push_back({t, d, EventOrigin::Background});
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const auto& l, const auto& r) { return l.time_s < r.time_s; });

    std::vector<double> times_a, times_b;
    for (const auto& e : events) (e.detector == Detector::A ? times_a : times_b).push_back(e.time_s);
    stream.coincidences = count_coincidences(times_a, times_b, cfg.effective_window_s());
    stream.events = std::move(events);
    return stream;
}

}  // namespace hom
