#include "hom/scan_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string_view>
#include <type_traits>
#include <vector>

namespace hom {
namespace {

constexpr std::string_view kFormat = "hom-scan";
constexpr int kFormatVersion = 1;

std::string where(std::size_t line, std::size_t column) {
    std::ostringstream s;
    s << "line " << line << ", column " << column << ": ";
    return s.str();
}

std::string_view axis_kind_name(AxisKind kind) {
    return kind == AxisKind::StagePositionUm ? "stage_position_um" : "waveplate_angle_rad";
}

AxisKind axis_kind_from_name(const std::string& name) {
    if (name == "stage_position_um") return AxisKind::StagePositionUm;
    if (name == "waveplate_angle_rad") return AxisKind::WaveplateAngleRad;
    throw SchemaError("unknown axis_kind '" + name + "'");
}

struct Field {
    std::string_view text;
    std::size_t column;  // 1-based
};

std::vector<Field> split_fields(std::string_view line) {
    std::vector<Field> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string_view::npos ? line.size() : comma;
        fields.push_back({line.substr(start, end - start), start + 1});
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <class T>
T parse_number(const Field& field, std::size_t line, const char* what) {
    T value{};
    const char* first = field.text.data();
    const char* last = first + field.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.text.empty()) {
        throw SchemaError(where(line, field.column) + "invalid " + what + " '" +
                              std::string(field.text) + "'",
                          line, field.column);
    }
    return value;
}

template <class T>
std::vector<T> array_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    if (!j.at(key).is_array()) throw SchemaError(std::string("field '") + key + "' must be an array");
    if constexpr (std::is_unsigned_v<T>) {
        // nlohmann converts -1 to a huge unsigned value without complaint.
        for (const auto& v : j.at(key)) {
            if (!v.is_number_unsigned()) {
                throw SchemaError(std::string("field '") + key + "' must hold non-negative integers");
            }
        }
    }
    try {
        return j.at(key).get<std::vector<T>>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

SchemaError::SchemaError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(message), line_(line), column_(column) {}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

std::string csv_header(AxisKind kind) {
    return "axis_" + std::string(axis_unit(kind)) + ",coincidences,singles_a,singles_b,accidentals";
}

void write_scan_csv(const ScanRecord& scan, std::ostream& out) {
    scan.validate();
    out << csv_header(scan.axis_kind) << '\n';
    for (std::size_t i = 0; i < scan.size(); ++i) {
        out << format_double(scan.axis_values[i]) << ',' << scan.coincidences[i] << ','
            << scan.singles_a[i] << ',' << scan.singles_b[i] << ','
            << format_double(scan.accidental_estimate[i]) << '\n';
    }
}

ScanRecord read_scan_csv(std::istream& in) {
    ScanRecord scan;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            if (line == csv_header(AxisKind::StagePositionUm)) {
                scan.axis_kind = AxisKind::StagePositionUm;
            } else if (line == csv_header(AxisKind::WaveplateAngleRad)) {
                scan.axis_kind = AxisKind::WaveplateAngleRad;
            } else {
                throw SchemaError(where(line_no, 1) + "expected header '" +
                                      csv_header(AxisKind::StagePositionUm) + "' or '" +
                                      csv_header(AxisKind::WaveplateAngleRad) + "'",
                                  line_no, 1);
            }
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 5) {
            const std::size_t col = fields.size() > 5 ? fields[5].column : line.size() + 1;
            throw SchemaError(where(line_no, col) + "expected 5 fields, found " +
                                  std::to_string(fields.size()),
                              line_no, col);
        }
        scan.axis_values.push_back(parse_number<double>(fields[0], line_no, "axis value"));
        scan.coincidences.push_back(parse_number<std::uint64_t>(fields[1], line_no, "count"));
        scan.singles_a.push_back(parse_number<std::uint64_t>(fields[2], line_no, "count"));
        scan.singles_b.push_back(parse_number<std::uint64_t>(fields[3], line_no, "count"));
        scan.accidental_estimate.push_back(
            parse_number<double>(fields[4], line_no, "accidental estimate"));
    }
    if (!have_header) throw SchemaError("empty CSV input", 1, 1);
    return scan;
}

nlohmann::json config_to_json(const DetectorConfig& cfg) {
    return {{"pair_rate", cfg.pair_rate},
            {"singles_rate_per_arm", cfg.singles_rate_per_arm},
            {"coincidence_window_ns", cfg.coincidence_window_ns},
            {"integration_time_s", cfg.integration_time_s},
            {"dark_rate", cfg.dark_rate},
            {"ceiling_counts", cfg.ceiling_counts},
            {"accidental_calibration", cfg.accidental_calibration},
            {"rng_seed", cfg.rng_seed}};
}

DetectorConfig config_from_json(const nlohmann::json& j) {
    DetectorConfig cfg;
    try {
        cfg.pair_rate = j.at("pair_rate").get<double>();
        cfg.singles_rate_per_arm = j.at("singles_rate_per_arm").get<double>();
        cfg.coincidence_window_ns = j.at("coincidence_window_ns").get<double>();
        cfg.integration_time_s = j.at("integration_time_s").get<double>();
        cfg.dark_rate = j.at("dark_rate").get<double>();
        cfg.ceiling_counts = j.at("ceiling_counts").get<double>();
        cfg.accidental_calibration = j.at("accidental_calibration").get<double>();
        cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }
    return cfg;
}

nlohmann::json scan_to_json(const ScanRecord& scan) {
    scan.validate();
    nlohmann::json j;
    j["format"] = kFormat;
    j["version"] = kFormatVersion;
    j["axis_kind"] = axis_kind_name(scan.axis_kind);
    j["axis_unit"] = axis_unit(scan.axis_kind);
    j["axis"] = scan.axis_values;
    j["coincidences"] = scan.coincidences;
    j["singles_a"] = scan.singles_a;
    j["singles_b"] = scan.singles_b;
    j["accidentals"] = scan.accidental_estimate;
    j["seed"] = scan.seed;
    j["generator"] = scan.generator;
    j["model_parameters"] = scan.model_parameters;
    j["config"] = scan.config ? config_to_json(*scan.config) : nlohmann::json(nullptr);
    return j;
}

ScanRecord scan_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("scan JSON must be an object");
    if (j.value("format", std::string{}) != kFormat) {
        throw SchemaError("field 'format' must be \"hom-scan\"");
    }
    ScanRecord scan;
    scan.axis_kind = axis_kind_from_name(j.value("axis_kind", std::string{}));
    scan.axis_values = array_field<double>(j, "axis");
    scan.coincidences = array_field<std::uint64_t>(j, "coincidences");
    scan.singles_a = array_field<std::uint64_t>(j, "singles_a");
    scan.singles_b = array_field<std::uint64_t>(j, "singles_b");
    scan.accidental_estimate = array_field<double>(j, "accidentals");
    try {
        scan.seed = j.value("seed", std::uint64_t{0});
        scan.generator = j.value("generator", std::string{});
        if (j.contains("model_parameters")) {
            scan.model_parameters = j.at("model_parameters").get<std::map<std::string, double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("provenance: ") + e.what());
    }
    if (j.contains("config") && !j.at("config").is_null()) {
        scan.config = config_from_json(j.at("config"));
    }
    try {
        scan.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    return scan;
}

void write_scan_json(const ScanRecord& scan, std::ostream& out) {
    out << scan_to_json(scan).dump(2) << '\n';
}

ScanRecord read_scan_json(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Translate the byte offset into a line and column.
        std::size_t line = 1, column = 1;
        const std::size_t limit = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw SchemaError(where(line, column) + e.what(), line, column);
    }
    return scan_from_json(j);
}

ScanRecord read_scan_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    if (path.extension() == ".json") return read_scan_json(in);
    return read_scan_csv(in);
}

nlohmann::json fit_to_json(const FitResult& fit) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& p : fit.parameters) {
        params[p.name] = {{"value", p.value}, {"uncertainty", p.uncertainty}};
    }
    return {{"model", fit.model},
            {"parameters", params},
            {"chi_square", fit.chi_square},
            {"reduced_chi_square", fit.reduced_chi_square},
            {"degrees_of_freedom", fit.degrees_of_freedom},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"gradient_norm", fit.gradient_norm},
            {"residuals", fit.residuals},
            {"sigmas", fit.sigmas},
            {"warnings", fit.warnings}};
}

}  // namespace hom
