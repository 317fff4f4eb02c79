#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hom/wavepacket.hpp"
#include "random_inputs.hpp"

namespace hom {
namespace {

const double kLc = coherence_length(810.8, 10.0);

// Half width at which dip_probability crosses 1/4, by bisection.
double bisect_quarter_crossing(double lc) {
    double lo = 0.0, hi = 5.0 * lc;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (dip_probability(mid, lc) < 0.25 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TEST(CoherenceLength, FilterBandwidths) {
    EXPECT_NEAR(coherence_length(810.8, 10.0), 65.7, 0.1);
    EXPECT_NEAR(coherence_length(810.8, 30.0), 21.9, 0.1);
    EXPECT_DOUBLE_EQ(coherence_length(810.8, 10.0), 810.8 * 810.8 / 10.0 / 1000.0);
}

TEST(CoherenceLength, HalfBandwidthGivesTwiceWavelength) {
    for (double lambda : {400.0, 810.8, 1550.0}) {
        EXPECT_NEAR(coherence_length(lambda, lambda / 2.0), 2.0 * lambda / 1000.0, 1e-12);
        EXPECT_NEAR(coherence_length(lambda, lambda), lambda / 1000.0, 1e-12);
    }
}

TEST(CoherenceLength, InvalidInputs) {
    EXPECT_THROW(coherence_length(0.0, 1.0), std::domain_error);
    EXPECT_THROW(coherence_length(800.0, 0.0), std::domain_error);
    EXPECT_THROW(coherence_length(800.0, -5.0), std::domain_error);
    EXPECT_THROW(coherence_length(800.0, 900.0), std::domain_error);
}

TEST(WavepacketSpec, DerivedQuantities) {
    const WavepacketSpec spec(810.8, 10.0);
    EXPECT_DOUBLE_EQ(spec.coherence_length_um(), kLc);
    EXPECT_NEAR(spec.coherence_time_fs(), kLc / 0.299792458, 1e-9);
    // E = hc / lambda, so dE = hc dlambda / lambda^2 = 1239.84 eV nm * 10 / 810.8^2.
    EXPECT_NEAR(spec.energy_bandwidth_ev(), 1239.84198 * 10.0 / (810.8 * 810.8), 1e-8);
}

TEST(Overlap, UnityAtZeroDisplacement) {
    for (double lc : {1.0, kLc, 500.0}) {
        EXPECT_EQ(overlap_quadrature(0.0, lc), 1.0);
        EXPECT_EQ(overlap_closed_form(0.0, lc), 1.0);
    }
}

TEST(Overlap, ClosedFormSpecialPoints) {
    EXPECT_NEAR(overlap_closed_form(kLc / std::numbers::sqrt2, kLc), 0.5, 1e-15);
    EXPECT_NEAR(overlap_closed_form(kLc, kLc), 0.25, 1e-15);
    EXPECT_NEAR(overlap_quadrature(kLc, kLc), 0.25, 1e-8);
}

TEST(Overlap, QuadratureMatchesClosedFormOnGrid) {
    for (int k = 0; k <= 120; ++k) {
        const double x0 = (-3.0 + 6.0 * k / 120.0) * kLc;
        EXPECT_NEAR(overlap_quadrature(x0, kLc), overlap_closed_form(x0, kLc), 1e-8) << "x0 = " << x0;
    }
}

TEST(Overlap, EvenInDisplacement) {
    testing::RandomInputs rnd(13);
    for (int trial = 0; trial < 40; ++trial) {
        const double lc = rnd.uniform(5.0, 200.0);
        const double x0 = rnd.uniform(0.0, 4.0 * lc);
        EXPECT_EQ(overlap_closed_form(x0, lc), overlap_closed_form(-x0, lc));
        EXPECT_NEAR(overlap_quadrature(x0, lc), overlap_quadrature(-x0, lc), 1e-10);
    }
}

TEST(Overlap, DecaysToZero) {
    EXPECT_LT(overlap_quadrature(8.0 * kLc, kLc), 1e-30);
    EXPECT_LT(overlap_closed_form(-20.0 * kLc, kLc), 1e-200);
}

TEST(Overlap, MonotoneInAbsoluteDisplacement) {
    double prev_p = 2.0, prev_dip = -1.0;
    for (int k = 0; k <= 200; ++k) {
        const double x0 = 4.0 * kLc * k / 200.0;
        const double p = overlap_closed_form(x0, kLc);
        const double dip = dip_probability(x0, kLc);
        EXPECT_LE(p, prev_p);
        EXPECT_GE(dip, prev_dip);
        prev_p = p;
        prev_dip = dip;
    }
}

TEST(Overlap, NonPositiveCoherenceLengthThrows) {
    EXPECT_THROW(overlap_closed_form(1.0, 0.0), std::domain_error);
    EXPECT_THROW(overlap_quadrature(1.0, -1.0), std::domain_error);
}

TEST(DipProbability, MinimumAndAsymptote) {
    EXPECT_NEAR(dip_probability(0.0, kLc), 0.0, 1e-12);
    EXPECT_NEAR(dip_probability(10.0 * kLc, kLc), 0.5, 1e-12);
    EXPECT_NEAR(dip_probability(-10.0 * kLc, kLc, OverlapMethod::Quadrature), 0.5, 1e-12);
}

TEST(DipProbability, PipelineMatchesFormula) {
    for (int k = 0; k <= 120; ++k) {
        const double x0 = (-3.0 + 6.0 * k / 120.0) * kLc;
        EXPECT_NEAR(dip_probability(x0, kLc), (1.0 - overlap_closed_form(x0, kLc)) / 2.0, 1e-12);
    }
}

TEST(DipProbability, ScaleInvariant) {
    testing::RandomInputs rnd(19);
    for (int trial = 0; trial < 40; ++trial) {
        const double x0 = rnd.uniform(-200.0, 200.0), k = rnd.uniform(0.1, 10.0);
        EXPECT_NEAR(dip_probability(k * x0, k * kLc), dip_probability(x0, kLc), 1e-12);
    }
}

TEST(DipProbability, FullWidthAtQuarterIsSqrt2Lc) {
    for (double lc : {kLc, coherence_length(810.8, 30.0), 3.0}) {
        EXPECT_NEAR(2.0 * bisect_quarter_crossing(lc), dip_fwhm(lc), 1e-9 * lc);
    }
    EXPECT_NEAR(dip_fwhm(kLc), std::numbers::sqrt2 * kLc, 1e-12);
}

TEST(Delay, StageStepAndSpeedOfLight) {
    EXPECT_NEAR(delay_from_displacement(5.33), 17.8, 0.1);
    EXPECT_EQ(delay_from_displacement(0.0), 0.0);
    EXPECT_NEAR(delay_from_displacement(299.792458), 1000.0, 1e-9);
}

}  // namespace
}  // namespace hom
