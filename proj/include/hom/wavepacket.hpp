#pragma once

// Temporal distinguishability: coherence length from a filter bandwidth and
// the Gaussian overlap p(x0) that weights the Werner mixture.
//
// Units: wavelengths in nm, lengths in um, times in fs.

namespace hom {

/// Vacuum speed of light in um/fs.
inline constexpr double kSpeedOfLightUmPerFs = 0.299792458;

class WavepacketSpec {
  public:
    /// Requires 0 < bandwidth <= wavelength.
    WavepacketSpec(double center_wavelength_nm, double bandwidth_fwhm_nm);

    double center_wavelength_nm() const { return wavelength_nm_; }
    double bandwidth_fwhm_nm() const { return bandwidth_nm_; }
    /// lambda^2 / delta_lambda
    double coherence_length_um() const;
    /// coherence length / c
    double coherence_time_fs() const;
    /// h c delta_lambda / lambda^2
    double energy_bandwidth_ev() const;

  private:
    double wavelength_nm_;
    double bandwidth_nm_;
};

/// lambda^2 / delta_lambda converted to um.
double coherence_length(double wavelength_nm, double bandwidth_nm);

/// Adaptive-quadrature overlap of two Gaussians of FWHM lc displaced by x0,
/// normalized so the value at x0 = 0 is exactly 1.
double overlap_quadrature(double x0_um, double lc_um);

/// exp(-2 ln2 x0^2 / lc^2)
double overlap_closed_form(double x0_um, double lc_um);

enum class OverlapMethod { ClosedForm, Quadrature };

/// Coincidence probability at path difference x0, evaluated through the
/// Werner-state density-matrix pipeline with p = overlap(x0).
double dip_probability(double x0_um, double lc_um,
                       OverlapMethod method = OverlapMethod::ClosedForm);

/// Coincidence probability for a Werner weight p, through the pipeline.
double werner_coincidence(double p);

/// Full width of the predicted dip at P_c = 1/4, sqrt(2) * lc.
double dip_fwhm(double lc_um);

/// x0 / c in fs.
double delay_from_displacement(double x0_um);

}  // namespace hom
