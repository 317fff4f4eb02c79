#include "hom/fit.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hom/diagnostics.hpp"

namespace hom {
namespace {

constexpr std::size_t kMinPoints = 8;
constexpr double kLn2 = std::numbers::ln2;

void require_fit_data(std::span<const double> x, std::span<const double> counts,
                      const char* what) {
    if (x.size() != counts.size()) {
        throw std::invalid_argument(std::string(what) + ": axis and counts differ in length");
    }
    if (x.size() < kMinPoints) {
        throw std::invalid_argument(std::string(what) + ": need at least 8 points");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(counts[i]) || counts[i] < 0.0) {
            throw std::invalid_argument(std::string(what) +
                                        ": axis must be finite and counts non-negative");
        }
    }
}

double top_quartile_mean(std::span<const double> counts) {
    std::vector<double> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t k = std::max<std::size_t>(1, (sorted.size() + 3) / 4);
    return std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
           static_cast<double>(k);
}

// Span between the half-depth crossings on either side of the minimum.
double half_depth_width(std::span<const double> x, std::span<const double> y, std::size_t imin,
                        double baseline) {
    const double level = 0.5 * (baseline + y[imin]);
    auto crossing = [&](std::size_t from, std::size_t to) -> double {
        return x[from] + (level - y[from]) * (x[to] - x[from]) / (y[to] - y[from]);
    };
    double left = std::numeric_limits<double>::quiet_NaN();
    double right = left;
    for (std::size_t i = imin; i > 0; --i) {
        if (y[i - 1] >= level) {
            left = crossing(i, i - 1);
            break;
        }
    }
    for (std::size_t i = imin; i + 1 < y.size(); ++i) {
        if (y[i + 1] >= level) {
            right = crossing(i, i + 1);
            break;
        }
    }
    const double span = std::abs(x.back() - x.front());
    if (std::isfinite(left) && std::isfinite(right)) return std::abs(right - left);
    if (std::isfinite(left)) return 2.0 * std::abs(x[imin] - left);
    if (std::isfinite(right)) return 2.0 * std::abs(right - x[imin]);
    return span / 4.0;
}

double reduce_phase(double phase) {
    const double period = 0.5 * std::numbers::pi;
    return phase - period * std::round(phase / period);
}

struct Problem {
    std::string model;
    std::vector<std::string> names;
    ModelFunction function;
    std::vector<double> initial;
    std::size_t visibility_index = 1;
};

FitResult run_fit(const Problem& problem, std::span<const double> x,
                  std::span<const double> counts, bool degenerate,
                  const LeastSquaresOptions& options) {
    FitResult fit;
    fit.model = problem.model;
    fit.sigmas = poisson_sigmas(counts);

    std::vector<bool> fixed(problem.initial.size(), false);
    auto initial = problem.initial;
    if (degenerate) {
        initial[problem.visibility_index] = 0.0;
        fixed[problem.visibility_index] = true;
        fit.warnings.push_back("flat scan: visibility pinned to 0");
        warn(problem.model + " fit: flat scan, visibility pinned to 0");
    }

    const auto ls =
        levenberg_marquardt(problem.function, x, counts, fit.sigmas, initial, options, fixed);
    const std::size_t np = ls.params.size();
    for (std::size_t j = 0; j < np; ++j) {
        const double var = ls.covariance[j * np + j];
        fit.parameters.push_back(
            {problem.names[j], ls.params[j], std::isfinite(var) ? std::sqrt(std::max(var, 0.0))
                                                                : std::numeric_limits<double>::infinity()});
    }
    fit.residuals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.residuals[i] = counts[i] - problem.function(x[i], ls.params);
    }
    const auto n_free = static_cast<std::size_t>(std::count(fixed.begin(), fixed.end(), false));
    fit.chi_square = ls.chi_square;
    fit.degrees_of_freedom = x.size() - n_free;
    fit.reduced_chi_square = reduced_chi_square(fit.residuals, fit.sigmas, n_free);
    fit.iterations = ls.iterations;
    fit.converged = ls.converged;
    fit.gradient_norm = ls.gradient_norm;
    fit.chi_square_history = ls.chi_square_history;
    if (!fit.converged) {
        fit.warnings.push_back("did not converge; returning the best iterate");
    }
    return fit;
}

}  // namespace

double DipModel::operator()(double x_um) const {
    const double d = x_um - center_um;
    return baseline * (1.0 - visibility * std::exp(-4.0 * kLn2 * d * d / (width_um * width_um)));
}

double CosineModel::operator()(double phi_rad) const {
    const double c = std::cos(2.0 * phi_rad - 2.0 * phase_rad);
    return ceiling * (1.0 - visibility * c * c);
}

const FitParameter& FitResult::parameter(std::string_view name) const {
    for (const auto& p : parameters) {
        if (p.name == name) return p;
    }
    throw std::out_of_range("FitResult: no parameter named " + std::string(name));
}

DipModel FitResult::dip_model() const {
    return {value("baseline"), value("visibility"), value("center_um"), value("width_um")};
}

CosineModel FitResult::cosine_model() const {
    return {value("ceiling"), value("visibility"), value("phase_rad")};
}

double visibility(double n_max, double n_min) {
    if (!(n_max > 0.0) || !(n_min >= 0.0) || n_min > n_max) {
        throw std::domain_error("visibility: need n_max >= n_min >= 0 and n_max > 0");
    }
    return (n_max - n_min) / (n_max + n_min);
}

double reduced_chi_square(std::span<const double> residuals, std::span<const double> sigmas,
                          std::size_t n_params) {
    if (residuals.size() != sigmas.size()) {
        throw std::invalid_argument("reduced_chi_square: lengths differ");
    }
    if (residuals.size() <= n_params) {
        throw std::domain_error("reduced_chi_square: no degrees of freedom");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const double z = residuals[i] / sigmas[i];
        sum += z * z;
    }
    return sum / static_cast<double>(residuals.size() - n_params);
}

double fwhm_of_dip(const DipModel& model) {
    if (model.visibility == 0.0) throw std::domain_error("fwhm_of_dip: undefined for v = 0");
    return std::abs(model.width_um);
}

std::vector<double> poisson_sigmas(std::span<const double> counts) {
    std::vector<double> s(counts.size());
    std::transform(counts.begin(), counts.end(), s.begin(),
                   [](double c) { return std::sqrt(std::max(c, 1.0)); });
    return s;
}

FitResult fit_dip(std::span<const double> positions_um, std::span<const double> counts,
                  const LeastSquaresOptions& options) {
    require_fit_data(positions_um, counts, "fit_dip");
    const auto [min_it, max_it] = std::minmax_element(counts.begin(), counts.end());
    const auto imin = static_cast<std::size_t>(min_it - counts.begin());
    const bool degenerate = *max_it == *min_it;

    const double baseline = top_quartile_mean(counts);
    Problem problem;
    problem.model = "dip";
    problem.names = {"baseline", "visibility", "center_um", "width_um"};
    problem.function = [](double x, std::span<const double> p) {
        return DipModel{p[0], p[1], p[2], p[3]}(x);
    };
    problem.initial = {baseline, degenerate ? 0.0 : visibility(*max_it, *min_it),
                       positions_um[imin],
                       half_depth_width(positions_um, counts, imin, baseline)};
    if (!(problem.initial[3] > 0.0)) problem.initial[3] = 1.0;

    auto fit = run_fit(problem, positions_um, counts, degenerate, options);
    for (auto& p : fit.parameters) {
        if (p.name == "width_um") p.value = std::abs(p.value);
    }
    return fit;
}

FitResult fit_dip(const ScanRecord& scan, const LeastSquaresOptions& options) {
    scan.validate();
    if (scan.axis_kind != AxisKind::StagePositionUm) {
        throw std::invalid_argument("fit_dip: scan axis is not a stage position");
    }
    std::vector<double> counts(scan.coincidences.begin(), scan.coincidences.end());
    return fit_dip(scan.axis_values, counts, options);
}

FitResult fit_cosine(std::span<const double> phi_rad, std::span<const double> counts,
                     const LeastSquaresOptions& options) {
    require_fit_data(phi_rad, counts, "fit_cosine");
    const auto [min_it, max_it] = std::minmax_element(counts.begin(), counts.end());
    const auto imax = static_cast<std::size_t>(max_it - counts.begin());
    const bool degenerate = *max_it == *min_it;

    Problem problem;
    problem.model = "cosine";
    problem.names = {"ceiling", "visibility", "phase_rad"};
    problem.function = [](double x, std::span<const double> p) {
        return CosineModel{p[0], p[1], p[2]}(x);
    };
    // Maxima sit where 2 phi - 2 phase = pi/2 (mod pi).
    problem.initial = {top_quartile_mean(counts),
                       degenerate ? 0.0 : visibility(*max_it, *min_it),
                       degenerate ? 0.0 : reduce_phase(phi_rad[imax] - 0.25 * std::numbers::pi)};

    auto fit = run_fit(problem, phi_rad, counts, degenerate, options);
    for (auto& p : fit.parameters) {
        if (p.name == "phase_rad") p.value = reduce_phase(p.value);
    }
    return fit;
}

FitResult fit_cosine(const ScanRecord& scan, const LeastSquaresOptions& options) {
    scan.validate();
    if (scan.axis_kind != AxisKind::WaveplateAngleRad) {
        throw std::invalid_argument("fit_cosine: scan axis is not a waveplate angle");
    }
    std::vector<double> counts(scan.coincidences.begin(), scan.coincidences.end());
    return fit_cosine(scan.axis_values, counts, options);
}

ConstancyTest constancy_test(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) throw std::invalid_argument("constancy_test: need at least 2 counts");
    double mean = 0.0;
    for (auto c : counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(counts.size());
    ConstancyTest test;
    test.degrees_of_freedom = counts.size() - 1;
    if (mean == 0.0) return test;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - mean;
        test.chi_square += d * d / mean;
    }
    test.p_value = boost::math::gamma_q(0.5 * static_cast<double>(test.degrees_of_freedom),
                                        0.5 * test.chi_square);
    return test;
}

}  // namespace hom
