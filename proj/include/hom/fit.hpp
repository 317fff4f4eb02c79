#pragma once

// Curve fits for measured or simulated HOM scans.
//
// Both fits weight points by Poisson errors sigma = sqrt(max(count, 1)) and
// keep zero-count bins.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hom/detector_sim.hpp"
#include "hom/least_squares.hpp"

namespace hom {

/// Inverted Gaussian N(x) = baseline [1 - v exp(-4 ln2 (x - center)^2 / width^2)].
struct DipModel {
    double baseline = 0.0;
    double visibility = 0.0;
    double center_um = 0.0;
    double width_um = 0.0;  // full width at half depth

    double operator()(double x_um) const;
};

/// N(phi) = ceiling [1 - v cos^2(2 phi - 2 phase)].
struct CosineModel {
    double ceiling = 0.0;
    double visibility = 0.0;
    double phase_rad = 0.0;

    double operator()(double phi_rad) const;
};

struct FitParameter {
    std::string name;
    double value = 0.0;
    double uncertainty = 0.0;  // 1 sigma; infinite when unconstrained
};

struct FitResult {
    std::string model;  // "dip" or "cosine"
    std::vector<FitParameter> parameters;
    double chi_square = 0.0;
    double reduced_chi_square = 0.0;
    std::size_t degrees_of_freedom = 0;
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    std::vector<double> residuals;  // data - model
    std::vector<double> sigmas;
    std::vector<double> chi_square_history;
    std::vector<std::string> warnings;

    const FitParameter& parameter(std::string_view name) const;
    double value(std::string_view name) const { return parameter(name).value; }
    double uncertainty(std::string_view name) const { return parameter(name).uncertainty; }

    DipModel dip_model() const;
    CosineModel cosine_model() const;
};

/// (n_max - n_min) / (n_max + n_min)
double visibility(double n_max, double n_min);

/// sum((r / sigma)^2) / (n - n_params)
double reduced_chi_square(std::span<const double> residuals, std::span<const double> sigmas,
                          std::size_t n_params);

/// The dip's full width at half depth; throws when v == 0.
double fwhm_of_dip(const DipModel& model);

/// sqrt(max(count, 1))
std::vector<double> poisson_sigmas(std::span<const double> counts);

FitResult fit_dip(std::span<const double> positions_um, std::span<const double> counts,
                  const LeastSquaresOptions& options = {});
FitResult fit_dip(const ScanRecord& scan, const LeastSquaresOptions& options = {});

FitResult fit_cosine(std::span<const double> phi_rad, std::span<const double> counts,
                     const LeastSquaresOptions& options = {});
FitResult fit_cosine(const ScanRecord& scan, const LeastSquaresOptions& options = {});

/// Pearson chi-square test that counts share one Poisson mean.
struct ConstancyTest {
    double chi_square = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
};
ConstancyTest constancy_test(std::span<const std::uint64_t> counts);

}  // namespace hom
