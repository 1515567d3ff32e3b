#pragma once
/*
 * Voltage noise budget of the locked readout: thermally driven membrane
 * modes mapped through the dispersive response, white photon shot noise,
 * a flat electronic floor and an optional laser frequency-noise term.
 * Components are stored as two-sided densities S(f); the matching
 * one-sided density is G(|f|) = 2 S(f).
 *
 * Sampling is modelled by folding all structured spectral content above
 * the Nyquist frequency back into band before a trace is synthesized, so
 * modes above fs/2 show up at their aliased positions.
 */

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mimpol {

struct MembraneConfig {
    double stress = 1.0e9;        // Pa
    double density = 3170.0;      // kg/m^3
    double side_a = 1e-3;         // m
    double side_b = 1e-3;         // m
    double thickness = 50e-9;     // m
    double damping = 2.0 * 3.14159265358979323846 * 10.3e3;  // rad/s, FWHM * 2 pi
    double temperature = 300.0;   // K

    double effective_mass() const;  // rho a b t / 4
    bool underdamped() const;       // damping well below the fundamental
    void validate() const;
};

/// Mode frequency of a rectangular membrane under uniform tensile stress:
/// f_mn = (1/2) sqrt(T/rho) sqrt(m^2/a^2 + n^2/b^2); for a square membrane
/// f_11 = sqrt(2 T / rho) / (2 a).
double mode_frequency(int m, int n, const MembraneConfig& mc);

/// Two-sided displacement density of one underdamped thermal mode,
/// S_zz(f) = kT / (m_eff (2 pi f0)^2) * 2 gamma / (16 pi^2 (|f|-f0)^2 + gamma^2).
double thermal_psd(double f, double f0, double effective_mass, double damping,
                   double temperature);

/// Fundamental-mode density for the given membrane.
double thermal_psd(double f, const MembraneConfig& mc);

/// Photon flux (1/s) carried by an optical power at the given wavelength.
double flux_from_power(double watts, double wavelength);

struct DetectionConfig {
    double g_el = 5.24e-13;           // V/Hz, voltage per half-flux
    double eta = 0.88;                // detection quantum efficiency
    double alpha = 0.0;               // input polarization angle, rad
    double S0_in = 0.0;               // half the input photon flux, 1/s
    double detected_power = 0.0;      // W at the detector pair; 0 = derive from alpha
    double responsivity = 0.56;       // A/W
    double electronic_floor = 0.0;    // one-sided V^2/Hz, echoed into the model
    double sampling_rate = 2.5e6;     // Hz
    double wavelength = 795e-9;       // m
    double overlap_efficiency = 1.0;  // multiplies the dispersive response

    static double s0_from_power(double watts, double wavelength);
    void validate() const;
};

enum class NoiseKind { thermal, shot, electronic, frequency };

struct SpectrumComponent {
    NoiseKind kind;
    std::string label;
    std::function<double(double)> two_sided;  // S(f), symmetric in f
    bool white = false;
    double support_max = 0.0;  // Hz beyond which the density is negligible
};

struct SpectrumModel {
    std::vector<SpectrumComponent> components;
    std::vector<std::string> warnings;

    double two_sided(double f) const;
    double one_sided(double f) const { return 2.0 * two_sided(std::abs(f)); }
    double two_sided(double f, NoiseKind kind) const;
    double one_sided(double f, NoiseKind kind) const { return 2.0 * two_sided(std::abs(f), kind); }
};

/// One-sided laser frequency noise G_ff (Hz^2/Hz) sampled on a frequency
/// grid; evaluation interpolates linearly in log-frequency and clamps
/// outside the table.
struct LaserFrequencyNoise {
    std::vector<double> frequency;
    std::vector<double> psd_one_sided;

    double operator()(double f) const;
    void validate() const;
};

/// Composed voltage noise model. chi is the membrane-displacement response
/// |d rho / d dz_m| (1/m), chi_f the laser-frequency response (1/Hz); both
/// enter through the linearized readout U = g_el eta <Sy,in> Im(rho).
/// The shot level follows the detected power when it is set, otherwise the
/// reference-beam flux cos^2(alpha) * S0_in.
SpectrumModel signal_psd(const std::vector<std::pair<int, int>>& modes,
                         const MembraneConfig& mc, double chi, double chi_f,
                         const DetectionConfig& det,
                         const std::optional<LaserFrequencyNoise>& laser_noise = {});

/// Electronic gain from the measured shot-noise slope G_UU / P_d:
/// g_el = sqrt(4 e slope / responsivity).
double gain_from_shot_noise(double slope, double responsivity);

/// Quantum efficiency from the responsivity: eta = r h c / (e lambda).
double quantum_efficiency(double responsivity, double wavelength);

/// In-band one-sided density a sampler at rate fs would see: structured
/// components folded about multiples of fs, white components passed as-is.
double folded_one_sided(const SpectrumModel& model, double f, double fs);

/// Stationary Gaussian voltage trace with the model's (folded) spectrum.
/// Deterministic for a fixed seed. An optional first-order high-pass with
/// the given corner frequency mimics an AC-coupled detector.
std::vector<double> synthesize_trace(const SpectrumModel& model, double fs, double duration,
                                     std::uint64_t seed, double highpass_hz = 0.0);

struct PsdEstimate {
    double df = 0.0;            // bin width, = 1 / segment duration
    std::vector<double> frequency;
    std::vector<double> psd;    // one-sided V^2/Hz
};

/// Averaged periodogram over non-overlapping segments; normalised so that
/// sum(G) * df equals the sample variance. averages = 0 uses all segments.
PsdEstimate estimate_psd(std::span<const double> samples, double fs,
                         std::size_t segment_length, std::size_t averages = 0);

} // namespace mimpol
