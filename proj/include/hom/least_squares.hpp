#pragma once

// Damped Gauss-Newton (Levenberg-Marquardt) for weighted curve fits with a
// central finite-difference Jacobian.

#include <functional>
#include <span>
#include <vector>

namespace hom {

using ModelFunction = std::function<double(double x, std::span<const double> params)>;

struct LeastSquaresOptions {
    int max_iterations = 200;
    /// Converged once an accepted step changes every parameter by less than
    /// this fraction of its magnitude...
    double relative_step_tol = 1e-8;
    /// ...and the scaled gradient is below this.
    double gradient_tol = 1e-5;
    double initial_damping = 1e-3;
};

struct LeastSquaresResult {
    std::vector<double> params;
    /// Row-major covariance (J^T W J)^-1. Parameters the data do not
    /// constrain get infinite variance; fixed parameters get zero.
    std::vector<double> covariance;
    double chi_square = 0.0;
    int iterations = 0;
    bool converged = false;
    /// max_j |g_j| / (||J_j|| max(||r||, 1)), the cosine between the
    /// residual vector and each Jacobian column.
    double gradient_norm = 0.0;
    /// chi-square after the initial point and after every accepted step.
    std::vector<double> chi_square_history;
};

/// d model(x_i) / d param_j by central differences, row-major n_points x n_params.
std::vector<double> finite_difference_jacobian(const ModelFunction& model,
                                               std::span<const double> x,
                                               std::span<const double> params);

/// Minimizes sum(((y - model(x)) / sigma)^2). Entries of `fixed` that are
/// true hold the matching parameter at its initial value.
LeastSquaresResult levenberg_marquardt(const ModelFunction& model, std::span<const double> x,
                                       std::span<const double> y, std::span<const double> sigma,
                                       std::vector<double> initial,
                                       const LeastSquaresOptions& options = {},
                                       const std::vector<bool>& fixed = {});

}  // namespace hom
