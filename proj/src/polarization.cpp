#include "hom/polarization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hom {
namespace {

constexpr std::size_t kDim = 16;

std::size_t momentum1(std::size_t i) { return (i >> 3) & 1U; }
std::size_t polarization1(std::size_t i) { return (i >> 2) & 1U; }
std::size_t momentum2(std::size_t i) { return (i >> 1) & 1U; }
std::size_t polarization2(std::size_t i) { return i & 1U; }

void require_16(const StateVector& state, const char* what) {
    if (state.dim() != kDim) {
        throw std::invalid_argument(std::string(what) + ": expected a 16-dim state");
    }
}

StateVector polarization_factor(const std::array<Complex, 2>& pol, int photon) {
    const auto n = std::to_string(photon);
    return StateVector({pol[0], pol[1]}, {"H" + n, "V" + n});
}

double reduce_mod_pi(double angle) {
    double r = std::fmod(angle, std::numbers::pi);
    if (r < 0.0) r += std::numbers::pi;
    if (r >= std::numbers::pi) r = 0.0;
    return r;
}

}  // namespace

WaveplateSetting WaveplateSetting::canonical() const {
    return {reduce_mod_pi(theta), reduce_mod_pi(phi)};
}

std::array<Complex, 2> polarization_state(double alpha) {
    return {Complex{-std::sin(alpha), 0.0}, Complex{std::cos(alpha), 0.0}};
}

StateVector polarized_photon(Port momentum, const std::array<Complex, 2>& pol, int photon) {
    return tensor(momentum_state(momentum, photon), polarization_factor(pol, photon));
}

StateVector initial_polarized_state() {
    const std::array<Complex, 2> v{0.0, 1.0};
    const auto xy = tensor(polarized_photon(Port::X, v, 1), polarized_photon(Port::Y, v, 2));
    const auto yx = tensor(polarized_photon(Port::Y, v, 1), polarized_photon(Port::X, v, 2));
    std::vector<Complex> amps(kDim);
    const double s = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < kDim; ++i) amps[i] = s * (xy[i] + yx[i]);
    return StateVector(std::move(amps), xy.basis_labels());
}

Operator hwp(double theta) {
    const double c = std::cos(2.0 * theta);
    const double s = std::sin(2.0 * theta);
    return Operator::from_rows({{-c, -s}, {-s, c}});
}

Operator momentum_projector(Port port) {
    std::vector<Complex> e(4);
    const auto k = static_cast<std::size_t>(port);
    e[k * 2 + k] = 1.0;
    return Operator(2, std::move(e));
}

Operator waveplate_pair(double theta, double phi) {
    const auto px = momentum_projector(Port::X);
    const auto py = momentum_projector(Port::Y);
    const auto wt = hwp(theta);
    const auto wp = hwp(phi);
    return tensor(tensor(tensor(px, wt), py), wp) + tensor(tensor(tensor(py, wp), px), wt);
}

StateVector apply_waveplates(const WaveplateSetting& setting, const StateVector& state) {
    require_16(state, "apply_waveplates");
    double same_arm = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
        if (momentum1(i) == momentum2(i)) same_arm += std::norm(state[i]);
    }
    if (same_arm > kAlgebraTol) {
        throw std::invalid_argument(
            "apply_waveplates: input has weight in the same-arm sector, which the "
            "waveplate operator annihilates");
    }
    return apply(waveplate_pair(setting.theta, setting.phi), state);
}

Operator four_slot_bs() {
    const auto b = symmetric_bs();
    const auto id = Operator::identity(2);
    return tensor(tensor(tensor(b, id), b), id);
}

StateVector exchange_swap(const StateVector& state) {
    require_16(state, "exchange_swap");
    std::vector<Complex> out(kDim);
    for (std::size_t i = 0; i < kDim; ++i) {
        const std::size_t swapped = (momentum2(i) << 3) | (polarization2(i) << 2) |
                                    (momentum1(i) << 1) | polarization1(i);
        out[swapped] = state[i];
    }
    return StateVector(std::move(out), state.basis_labels());
}

double polarized_coincidence(const StateVector& final_state) {
    require_16(final_state, "polarized_coincidence");
    double sum = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
        if (momentum1(i) != momentum2(i)) sum += std::norm(final_state[i]);
    }
    return sum;
}

double polarized_coincidence(double theta, double phi) {
    static const Operator bs = four_slot_bs();
    static const StateVector initial = initial_polarized_state();
    const auto after_plates = apply_waveplates({theta, phi}, initial);
    return polarized_coincidence(apply(bs, after_plates));
}

double polarized_port_probability(const StateVector& state, int photon, Port port) {
    require_16(state, "polarized_port_probability");
    if (photon != 1 && photon != 2) throw std::invalid_argument("photon index must be 1 or 2");
    const auto want = static_cast<std::size_t>(port);
    double sum = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
        const std::size_t m = photon == 1 ? momentum1(i) : momentum2(i);
        if (m == want) sum += std::norm(state[i]);
    }
    return sum;
}

}  // namespace hom
