#pragma once

// Two-photon momentum-space model of a symmetric beamsplitter.
//
// Each photon occupies one of two momentum modes, x or y. The two-photon
// basis is ordered (x1x2, x1y2, y1x2, y1y2).

#include "hom/linalg.hpp"

namespace hom {

enum class ExchangeSymmetry { Bosonic, Fermionic };

enum class Port { X = 0, Y = 1 };

struct BeamsplitterParams {
    Complex t;
    Complex r;

    /// t = 1/sqrt(2), r = i/sqrt(2).
    static BeamsplitterParams symmetric();

    /// Throws unless |t|^2 + |r|^2 = 1 and t, r are in quadrature.
    void validate() const;
};

/// [[t, r], [r, t]]
Operator beamsplitter(const BeamsplitterParams& params);
Operator symmetric_bs();
/// symmetric_bs() applied to each photon.
Operator two_photon_bs();

/// Single-photon momentum state; photon is 1 or 2 and only affects labels.
StateVector momentum_state(Port port, int photon);
/// |port1>_1 |port2>_2
StateVector product_state(Port photon1, Port photon2);

/// 2^{-1/2}(|x>|y> + |y>|x>) for bosons, with a minus sign for fermions.
StateVector initial_state(ExchangeSymmetry symmetry);

/// |<x1 y2|psi>|^2 + |<y1 x2|psi>|^2 for a normalized 4-dim state.
double coincidence_probability(const StateVector& final_state);

DensityMatrix rho_xy();
DensityMatrix rho_yx();
/// Pure indistinguishable state |psi_i><psi_i|.
DensityMatrix rho_indistinguishable();
/// Equal mixture of rho_xy and rho_yx.
DensityMatrix rho_distinguishable();

/// p * rho_ind + (1 - p) * rho_dis. p outside [0, 1] throws.
DensityMatrix werner_state(double p);

/// Tr[rho rho_xy] + Tr[rho rho_yx] for a 4x4 density matrix.
double coincidence_from_density(const DensityMatrix& rho_final);

/// Probability that the given photon leaves through the given port.
double port_probability(const DensityMatrix& rho, int photon, Port port);
double port_probability(const StateVector& state, int photon, Port port);

}  // namespace hom
