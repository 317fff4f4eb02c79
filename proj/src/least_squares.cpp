#include "hom/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace hom {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cholesky solve of the symmetric positive-definite system a x = b.
std::optional<std::vector<double>> cholesky_solve(std::size_t n, std::vector<double> a,
                                                  std::vector<double> b) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > 0.0)) return std::nullopt;
        const double l = std::sqrt(d);
        a[j * n + j] = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / l;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
        b[i] = s / a[i * n + i];
    }
    return b;
}

struct Evaluation {
    std::vector<double> weighted_residuals;  // (y - f) / sigma
    double chi_square = 0.0;
};

Evaluation evaluate(const ModelFunction& model, std::span<const double> x,
                    std::span<const double> y, std::span<const double> sigma,
                    std::span<const double> params) {
    Evaluation ev;
    ev.weighted_residuals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = (y[i] - model(x[i], params)) / sigma[i];
        ev.weighted_residuals[i] = r;
        ev.chi_square += r * r;
    }
    return ev;
}

struct NormalEquations {
    std::vector<double> jtj;   // free x free
    std::vector<double> jtr;   // free
};

NormalEquations build_normal_equations(const ModelFunction& model, std::span<const double> x,
                                       std::span<const double> sigma,
                                       std::span<const double> params,
                                       const std::vector<std::size_t>& free,
                                       const std::vector<double>& weighted_residuals) {
    const auto jac = finite_difference_jacobian(model, x, params);
    const std::size_t np = params.size();
    const std::size_t nf = free.size();
    NormalEquations ne{std::vector<double>(nf * nf), std::vector<double>(nf)};
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t a = 0; a < nf; ++a) {
            const double ja = jac[i * np + free[a]] / sigma[i];
            ne.jtr[a] += ja * weighted_residuals[i];
            for (std::size_t b = 0; b <= a; ++b) {
                ne.jtj[a * nf + b] += ja * jac[i * np + free[b]] / sigma[i];
            }
        }
    }
    for (std::size_t a = 0; a < nf; ++a) {
        for (std::size_t b = 0; b < a; ++b) ne.jtj[b * nf + a] = ne.jtj[a * nf + b];
    }
    return ne;
}

double scaled_gradient(const NormalEquations& ne, double chi_square) {
    const std::size_t nf = ne.jtr.size();
    const double rnorm = std::max(std::sqrt(chi_square), 1.0);
    double worst = 0.0;
    for (std::size_t a = 0; a < nf; ++a) {
        const double col = std::sqrt(ne.jtj[a * nf + a]);
        if (col > 0.0) worst = std::max(worst, std::abs(ne.jtr[a]) / (col * rnorm));
    }
    return worst;
}

}  // namespace

std::vector<double> finite_difference_jacobian(const ModelFunction& model,
                                               std::span<const double> x,
                                               std::span<const double> params) {
    const std::size_t np = params.size();
    std::vector<double> jac(x.size() * np);
    std::vector<double> shifted(params.begin(), params.end());
    const double step_scale = std::cbrt(std::numeric_limits<double>::epsilon());
    for (std::size_t j = 0; j < np; ++j) {
        const double h = step_scale * std::max(std::abs(params[j]), 1.0);
        shifted[j] = params[j] + h;
        const double up = shifted[j];
        std::vector<double> plus(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) plus[i] = model(x[i], shifted);
        shifted[j] = params[j] - h;
        const double width = up - shifted[j];
        for (std::size_t i = 0; i < x.size(); ++i) {
            jac[i * np + j] = (plus[i] - model(x[i], shifted)) / width;
        }
        shifted[j] = params[j];
    }
    return jac;
}

LeastSquaresResult levenberg_marquardt(const ModelFunction& model, std::span<const double> x,
                                       std::span<const double> y, std::span<const double> sigma,
                                       std::vector<double> initial,
                                       const LeastSquaresOptions& options,
                                       const std::vector<bool>& fixed) {
    if (x.size() != y.size() || x.size() != sigma.size()) {
        throw std::invalid_argument("levenberg_marquardt: data lengths differ");
    }
    if (!fixed.empty() && fixed.size() != initial.size()) {
        throw std::invalid_argument("levenberg_marquardt: fixed mask has the wrong length");
    }
    for (double s : sigma) {
        if (!(s > 0.0)) throw std::invalid_argument("levenberg_marquardt: sigma must be positive");
    }
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < initial.size(); ++j) {
        if (fixed.empty() || !fixed[j]) free.push_back(j);
    }
    const std::size_t nf = free.size();

    LeastSquaresResult result;
    result.params = std::move(initial);
    auto current = evaluate(model, x, y, sigma, result.params);
    result.chi_square_history.push_back(current.chi_square);
    double damping = options.initial_damping;

    auto ne = build_normal_equations(model, x, sigma, result.params, free,
                                     current.weighted_residuals);
    while (result.iterations < options.max_iterations && nf > 0) {
        ++result.iterations;
        double max_diag = 0.0;
        for (std::size_t a = 0; a < nf; ++a) max_diag = std::max(max_diag, ne.jtj[a * nf + a]);
        auto lhs = ne.jtj;
        for (std::size_t a = 0; a < nf; ++a) {
            const double d = std::max(ne.jtj[a * nf + a], 1e-12 * max_diag + 1e-300);
            lhs[a * nf + a] += damping * d;
        }
        const auto step = cholesky_solve(nf, lhs, ne.jtr);
        if (!step) {
            damping *= 10.0;
            if (damping > 1e20) break;
            continue;
        }
        auto trial = result.params;
        double rel_change = 0.0;
        for (std::size_t a = 0; a < nf; ++a) {
            const std::size_t j = free[a];
            trial[j] += (*step)[a];
            rel_change = std::max(rel_change, std::abs((*step)[a]) /
                                                  std::max(std::abs(result.params[j]), 1e-8));
        }
        auto candidate = evaluate(model, x, y, sigma, trial);
        if (std::isfinite(candidate.chi_square) && candidate.chi_square <= current.chi_square) {
            result.params = std::move(trial);
            current = std::move(candidate);
            result.chi_square_history.push_back(current.chi_square);
            damping = std::max(damping / 10.0, 1e-15);
            ne = build_normal_equations(model, x, sigma, result.params, free,
                                        current.weighted_residuals);
            if (rel_change < options.relative_step_tol &&
                scaled_gradient(ne, current.chi_square) < options.gradient_tol) {
                result.converged = true;
                break;
            }
        } else {
            damping *= 10.0;
            if (damping > 1e20) break;
        }
    }
    result.chi_square = current.chi_square;
    result.gradient_norm = nf > 0 ? scaled_gradient(ne, current.chi_square) : 0.0;
    if (!result.converged && result.gradient_norm < options.gradient_tol) {
        // No step can improve on the current point to working precision.
        result.converged = true;
    }
    if (nf == 0) result.converged = true;

    // Covariance over the free parameters the data constrain.
    const std::size_t np = result.params.size();
    result.covariance.assign(np * np, 0.0);
    double max_diag = 0.0;
    for (std::size_t a = 0; a < nf; ++a) max_diag = std::max(max_diag, ne.jtj[a * nf + a]);
    std::vector<std::size_t> constrained;
    for (std::size_t a = 0; a < nf; ++a) {
        if (ne.jtj[a * nf + a] > 1e-14 * max_diag && ne.jtj[a * nf + a] > 0.0) {
            constrained.push_back(a);
        } else {
            result.covariance[free[a] * np + free[a]] = kInf;
        }
    }
    const std::size_t nc = constrained.size();
    std::vector<double> sub(nc * nc);
    for (std::size_t a = 0; a < nc; ++a) {
        for (std::size_t b = 0; b < nc; ++b) {
            sub[a * nc + b] = ne.jtj[constrained[a] * nf + constrained[b]];
        }
    }
    for (std::size_t b = 0; b < nc; ++b) {
        std::vector<double> unit(nc);
        unit[b] = 1.0;
        const auto column = cholesky_solve(nc, sub, unit);
        for (std::size_t a = 0; a < nc; ++a) {
            const std::size_t ja = free[constrained[a]];
            const std::size_t jb = free[constrained[b]];
            result.covariance[ja * np + jb] = column ? (*column)[a] : kInf;
        }
    }
    return result;
}

}  // namespace hom
