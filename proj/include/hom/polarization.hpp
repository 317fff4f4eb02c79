#pragma once

// Momentum x polarization model on the 16-dim space ordered
// (momentum1, polarization1, momentum2, polarization2), each factor ordered
// (x, y) and (H, V). Index = m1*8 + p1*4 + m2*2 + p2.

#include <array>

#include "hom/interference.hpp"
#include "hom/linalg.hpp"

namespace hom {

enum class Polarization { H = 0, V = 1 };

/// Half-wave plate angles relative to vertical: theta on arm x, phi on arm y.
struct WaveplateSetting {
    double theta = 0.0;
    double phi = 0.0;

    /// Both angles reduced into [0, pi), the half-wave plate period.
    WaveplateSetting canonical() const;
};

/// Jones vector (H, V) of linear polarization at angle alpha from vertical,
/// with the sign convention of hwp(): hwp(theta) |V> = polarization_state(2 theta).
std::array<Complex, 2> polarization_state(double alpha);

/// |m, pol>_photon as a 4-dim single-photon state.
StateVector polarized_photon(Port momentum, const std::array<Complex, 2>& pol, int photon);

/// 2^{-1/2}(|x,V>_1 |y,V>_2 + |y,V>_1 |x,V>_2)
StateVector initial_polarized_state();

/// [[-cos 2theta, -sin 2theta], [-sin 2theta, cos 2theta]]
Operator hwp(double theta);

/// |port><port| on one momentum factor.
Operator momentum_projector(Port port);

/// P_x (x) W_theta (x) P_y (x) W_phi + P_y (x) W_phi (x) P_x (x) W_theta.
/// Not unitary on the full space: it annihilates the same-arm sector.
Operator waveplate_pair(double theta, double phi);

/// Applies waveplate_pair to a two-arm state. Throws if the input has
/// weight in the same-arm sector (both photons in x or both in y).
StateVector apply_waveplates(const WaveplateSetting& setting, const StateVector& state);

/// B (x) I (x) B (x) I
Operator four_slot_bs();

/// Swaps the (momentum, polarization) slot pairs of photons 1 and 2.
StateVector exchange_swap(const StateVector& state);

/// Sum of |amplitude|^2 over every basis state with the photons in
/// distinct momentum ports, both polarization outcomes included.
double polarized_coincidence(const StateVector& final_state);

/// Full pipeline: initial state, waveplates, beamsplitter, coincidence sum.
double polarized_coincidence(double theta, double phi);

/// Probability that a photon leaves through the given port, summed over
/// polarization.
double polarized_port_probability(const StateVector& state, int photon, Port port);

}  // namespace hom
