#include "hom/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hom/interference.hpp"

namespace hom {
namespace {

constexpr double kLn2 = std::numbers::ln2;
// h * c in eV nm.
constexpr double kPlanckTimesC_eVnm = 1239.8419843320026;

constexpr double kRelativeTolerance = 1e-10;
constexpr int kMaxDepth = 40;
constexpr int kPanels = 24;

void require_positive_lc(double lc_um) {
    if (!(lc_um > 0.0) || !std::isfinite(lc_um)) {
        throw std::domain_error("coherence length must be positive");
    }
}

struct Integrand {
    double x0;
    double lc;
    double operator()(double x) const {
        const double k = 4.0 * kLn2 / (lc * lc);
        const double prefactor = 2.0 * std::sqrt(2.0 * kLn2 / (lc * std::numbers::pi));
        return prefactor * std::exp(-k * x * x) * std::exp(-k * (x - x0) * (x - x0));
    }
};

double simpson(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const Integrand& f, double a, double fa, double m, double fm, double b,
                        double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, flm, m, fm);
    const double right = simpson(m, fm, frm, b, fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= kMaxDepth) {
        throw std::runtime_error("overlap_quadrature: adaptive refinement did not converge");
    }
    return adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
}

// Integrates over [min(0,x0) - 6 lc, max(0,x0) + 6 lc] split into panels.
double integrate_overlap(double x0, double lc, double abs_tol) {
    const Integrand f{x0, lc};
    const double a = std::min(0.0, x0) - 6.0 * lc;
    const double b = std::max(0.0, x0) + 6.0 * lc;
    const double h = (b - a) / kPanels;
    const double panel_tol = abs_tol / kPanels;
    double total = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        const double lo = a + i * h;
        const double hi = (i + 1 == kPanels) ? b : lo + h;
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo), fmid = f(mid), fhi = f(hi);
        total += adaptive_simpson(f, lo, flo, mid, fmid, hi, fhi, simpson(lo, flo, fmid, hi, fhi),
                                  panel_tol, 0);
    }
    return total;
}

}  // namespace

WavepacketSpec::WavepacketSpec(double center_wavelength_nm, double bandwidth_fwhm_nm)
    : wavelength_nm_(center_wavelength_nm), bandwidth_nm_(bandwidth_fwhm_nm) {
    // Validation lives in coherence_length().
    (void)coherence_length(wavelength_nm_, bandwidth_nm_);
}

double WavepacketSpec::coherence_length_um() const {
    return coherence_length(wavelength_nm_, bandwidth_nm_);
}

double WavepacketSpec::coherence_time_fs() const {
    return delay_from_displacement(coherence_length_um());
}

double WavepacketSpec::energy_bandwidth_ev() const {
    return kPlanckTimesC_eVnm * bandwidth_nm_ / (wavelength_nm_ * wavelength_nm_);
}

double coherence_length(double wavelength_nm, double bandwidth_nm) {
    if (!(wavelength_nm > 0.0) || !(bandwidth_nm > 0.0) || !std::isfinite(wavelength_nm) ||
        !std::isfinite(bandwidth_nm)) {
        throw std::domain_error("coherence_length: wavelength and bandwidth must be positive");
    }
    if (bandwidth_nm > wavelength_nm) {
        throw std::domain_error("coherence_length: bandwidth exceeds wavelength");
    }
    return wavelength_nm * wavelength_nm / bandwidth_nm / 1000.0;
}

double overlap_quadrature(double x0_um, double lc_um) {
    require_positive_lc(lc_um);
    if (!std::isfinite(x0_um)) return 0.0;
    if (x0_um == 0.0) return 1.0;
    // Peak height times width bounds the x0 = 0 integral from above, so one
    // absolute tolerance serves both integrals and bounds the error in p.
    const double scale = Integrand{0.0, lc_um}(0.0) * lc_um;
    const double abs_tol = kRelativeTolerance * scale;
    const double norm = integrate_overlap(0.0, lc_um, abs_tol);
    return integrate_overlap(x0_um, lc_um, abs_tol) / norm;
}

double overlap_closed_form(double x0_um, double lc_um) {
    require_positive_lc(lc_um);
    return std::exp(-2.0 * kLn2 * x0_um * x0_um / (lc_um * lc_um));
}

double werner_coincidence(double p) {
    static const Operator bs = two_photon_bs();
    return coincidence_from_density(conjugate_evolve(werner_state(p), bs));
}

double dip_probability(double x0_um, double lc_um, OverlapMethod method) {
    const double p = method == OverlapMethod::ClosedForm ? overlap_closed_form(x0_um, lc_um)
                                                         : overlap_quadrature(x0_um, lc_um);
    return werner_coincidence(std::clamp(p, 0.0, 1.0));
}

double dip_fwhm(double lc_um) {
    require_positive_lc(lc_um);
    return std::numbers::sqrt2 * lc_um;
}

double delay_from_displacement(double x0_um) { return x0_um / kSpeedOfLightUmPerFs; }

}  // namespace hom
