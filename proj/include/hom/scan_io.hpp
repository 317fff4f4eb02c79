#pragma once

// ScanRecord and FitResult serialization.
//
// CSV: one header row, then one row per scan point:
//   axis_um,coincidences,singles_a,singles_b,accidentals
// (axis_rad for waveplate scans). Reals are written in shortest
// round-trip form, so read -> write reproduces the file byte for byte.
//
// JSON: the same columns as arrays plus config, seed, and provenance.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "hom/detector_sim.hpp"
#include "hom/fit.hpp"
#include "json.hpp"

namespace hom {

/// Malformed input. line and column are 1-based; 0 when unknown.
class SchemaError : public std::runtime_error {
  public:
    SchemaError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::string csv_header(AxisKind kind);
void write_scan_csv(const ScanRecord& scan, std::ostream& out);
ScanRecord read_scan_csv(std::istream& in);

nlohmann::json config_to_json(const DetectorConfig& cfg);
DetectorConfig config_from_json(const nlohmann::json& j);

nlohmann::json scan_to_json(const ScanRecord& scan);
ScanRecord scan_from_json(const nlohmann::json& j);
void write_scan_json(const ScanRecord& scan, std::ostream& out);
ScanRecord read_scan_json(std::istream& in);

/// Dispatches on the extension: .json, otherwise CSV.
ScanRecord read_scan_file(const std::filesystem::path& path);

nlohmann::json fit_to_json(const FitResult& fit);

}  // namespace hom
