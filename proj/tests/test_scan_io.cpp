#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hom/scan_io.hpp"

namespace hom {
namespace {

const WavepacketSpec kFilter(810.8, 10.0);

ScanRecord sample_scan() {
    return simulate_dip_scan(-200, 200, 76, kFilter, 0.93, DetectorConfig{});
}

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-200), "-200");
    for (double v : {5.33 / 4.0, 1.0 / 3.0, 6.02214076e23, -1e-300}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(Csv, HeaderCarriesAxisUnit) {
    EXPECT_EQ(csv_header(AxisKind::StagePositionUm), "axis_um,coincidences,singles_a,singles_b,accidentals");
    EXPECT_EQ(csv_header(AxisKind::WaveplateAngleRad), "axis_rad,coincidences,singles_a,singles_b,accidentals");
}

TEST(Csv, ReadWriteIsByteExact) {
    std::stringstream first;
    write_scan_csv(sample_scan(), first);
    const auto parsed = read_scan_csv(first);
    std::stringstream second;
    write_scan_csv(parsed, second);
    EXPECT_EQ(first.str(), second.str());
    EXPECT_FALSE(parsed.config.has_value());
}

TEST(Csv, AcceptsCrlfAndBlankLines) {
    std::istringstream in("axis_rad,coincidences,singles_a,singles_b,accidentals\r\n0.5,10,100,101,7\r\n\r\n1,0,99,98,7\r\n");
    const auto scan = read_scan_csv(in);
    EXPECT_EQ(scan.axis_kind, AxisKind::WaveplateAngleRad);
    ASSERT_EQ(scan.size(), 2u);
    EXPECT_EQ(scan.coincidences[1], 0u);
}

TEST(Csv, DiagnosticsPointAtTheBadField) {
    std::istringstream bad_number("axis_um,coincidences,singles_a,singles_b,accidentals\n1,2,3,4,5\n1,2,x3,4,5\n");
    try {
        read_scan_csv(bad_number);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 5u);
    }
    std::istringstream negative("axis_um,coincidences,singles_a,singles_b,accidentals\n1,-2,3,4,5\n");
    EXPECT_THROW(read_scan_csv(negative), SchemaError);
    std::istringstream short_row("axis_um,coincidences,singles_a,singles_b,accidentals\n1,2,3\n");
    try {
        read_scan_csv(short_row);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream header("x,y\n");
    EXPECT_THROW(read_scan_csv(header), SchemaError);
    std::istringstream empty("");
    EXPECT_THROW(read_scan_csv(empty), SchemaError);
}

TEST(Json, RoundTripKeepsProvenance) {
    const auto scan = sample_scan();
    std::stringstream s;
    write_scan_json(scan, s);
    const auto back = read_scan_json(s);
    EXPECT_EQ(back.coincidences, scan.coincidences);
    EXPECT_EQ(back.axis_values, scan.axis_values);
    EXPECT_EQ(back.seed, scan.seed);
    EXPECT_EQ(back.generator, scan.generator);
    EXPECT_EQ(back.model_parameters, scan.model_parameters);
    ASSERT_TRUE(back.config.has_value());
    EXPECT_EQ(back.config->accidental_calibration, scan.config->accidental_calibration);
    std::stringstream again;
    write_scan_json(back, again);
    std::stringstream orig;
    write_scan_json(scan, orig);
    EXPECT_EQ(orig.str(), again.str());
}

TEST(Json, SchemaViolations) {
    std::istringstream syntax("{\n  \"format\": \"hom-scan\",\n  oops\n}");
    try {
        read_scan_json(syntax);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    std::istringstream wrong_format(R"({"format": "other"})");
    EXPECT_THROW(read_scan_json(wrong_format), SchemaError);
    std::istringstream ragged(R"({"format":"hom-scan","axis_kind":"stage_position_um","axis":[1,2],
        "coincidences":[1],"singles_a":[1,1],"singles_b":[1,1],"accidentals":[0,0]})");
    EXPECT_THROW(read_scan_json(ragged), SchemaError);
    std::istringstream negative(R"({"format":"hom-scan","axis_kind":"stage_position_um","axis":[1],
        "coincidences":[-1],"singles_a":[1],"singles_b":[1],"accidentals":[0]})");
    EXPECT_THROW(read_scan_json(negative), SchemaError);
}

TEST(FitJson, UnconstrainedUncertaintyBecomesNull) {
    FitResult fit;
    fit.model = "dip";
    fit.parameters = {{"visibility", 0.0, 0.01}, {"width_um", 1.0, INFINITY}};
    const auto j = fit_to_json(fit);
    EXPECT_TRUE(j.dump().find("\"uncertainty\":null") != std::string::npos);
    EXPECT_EQ(j.at("parameters").at("visibility").at("uncertainty").get<double>(), 0.01);
}

}  // namespace
}  // namespace hom
