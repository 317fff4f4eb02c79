#include "hom/interference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hom {
namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void require_photon(int photon) {
    if (photon != 1 && photon != 2) throw std::invalid_argument("photon index must be 1 or 2");
}

// Bit of the two-photon index holding the given photon's momentum.
std::size_t photon_bit(int photon) { return photon == 1 ? 2 : 1; }

}  // namespace

BeamsplitterParams BeamsplitterParams::symmetric() {
    return {Complex{kInvSqrt2, 0.0}, Complex{0.0, kInvSqrt2}};
}

void BeamsplitterParams::validate() const {
    if (std::abs(std::norm(t) + std::norm(r) - 1.0) > kAlgebraTol) {
        throw std::invalid_argument("beamsplitter: |t|^2 + |r|^2 != 1");
    }
    // [[t, r], [r, t]] is unitary only when Re(t r*) = 0.
    if (std::abs((t * std::conj(r)).real()) > kAlgebraTol) {
        throw std::invalid_argument("beamsplitter: t and r are not in quadrature");
    }
}

Operator beamsplitter(const BeamsplitterParams& params) {
    params.validate();
    return Operator::from_rows({{params.t, params.r}, {params.r, params.t}});
}

Operator symmetric_bs() { return beamsplitter(BeamsplitterParams::symmetric()); }

Operator two_photon_bs() {
    const auto b = symmetric_bs();
    return tensor(b, b);
}

StateVector momentum_state(Port port, int photon) {
    require_photon(photon);
    const auto n = std::to_string(photon);
    std::vector<Complex> amps(2);
    amps[static_cast<std::size_t>(port)] = 1.0;
    return StateVector(std::move(amps), {"x" + n, "y" + n});
}

StateVector product_state(Port photon1, Port photon2) {
    return tensor(momentum_state(photon1, 1), momentum_state(photon2, 2));
}

StateVector initial_state(ExchangeSymmetry symmetry) {
    const double sign = symmetry == ExchangeSymmetry::Bosonic ? 1.0 : -1.0;
    auto labels = product_state(Port::X, Port::Y).basis_labels();
    return StateVector({0.0, kInvSqrt2, sign * kInvSqrt2, 0.0}, std::move(labels));
}

double coincidence_probability(const StateVector& final_state) {
    if (final_state.dim() != 4) {
        throw std::invalid_argument("coincidence_probability: expected a 4-dim state");
    }
    if (!final_state.is_normalized()) {
        throw std::invalid_argument("coincidence_probability: state is not normalized");
    }
    return std::norm(final_state[1]) + std::norm(final_state[2]);
}

DensityMatrix rho_xy() { return outer(product_state(Port::X, Port::Y)); }
DensityMatrix rho_yx() { return outer(product_state(Port::Y, Port::X)); }

DensityMatrix rho_indistinguishable() { return outer(initial_state(ExchangeSymmetry::Bosonic)); }

DensityMatrix rho_distinguishable() { return convex_combination(rho_xy(), rho_yx(), 0.5); }

DensityMatrix werner_state(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("werner_state: p = " + std::to_string(p) + " outside [0, 1]");
    }
    return convex_combination(rho_indistinguishable(), rho_distinguishable(), p);
}

double coincidence_from_density(const DensityMatrix& rho_final) {
    if (rho_final.dim() != 4) {
        throw std::invalid_argument("coincidence_from_density: expected a 4x4 density matrix");
    }
    static const DensityMatrix xy = rho_xy();
    static const DensityMatrix yx = rho_yx();
    return trace_product(rho_final, xy) + trace_product(rho_final, yx);
}

double port_probability(const DensityMatrix& rho, int photon, Port port) {
    require_photon(photon);
    if (rho.dim() != 4) throw std::invalid_argument("port_probability: expected 4x4");
    const std::size_t bit = photon_bit(photon);
    const bool want_y = port == Port::Y;
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (((i & bit) != 0) == want_y) sum += rho(i, i).real();
    }
    return sum;
}

double port_probability(const StateVector& state, int photon, Port port) {
    require_photon(photon);
    if (state.dim() != 4) throw std::invalid_argument("port_probability: expected 4-dim state");
    const std::size_t bit = photon_bit(photon);
    const bool want_y = port == Port::Y;
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (((i & bit) != 0) == want_y) sum += std::norm(state[i]);
    }
    return sum;
}

}  // namespace hom
