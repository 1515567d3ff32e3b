#pragma once
/*
 * Three-element resonator (front mirror / membrane / back mirror) built on
 * the transfer chain. The membrane splits the resonator into two coupled
 * sub-cavities of lengths L1 - dz_m and L2 + dz_m + dz_c; moving the back
 * mirror (dz_c) changes only the rear segment, never L1, while a laser
 * detuning rescales the wavenumber globally.
 *
 * The strongest dispersive coupling occurs where the back sub-cavity is
 * resonant and the front one anti-resonant (L1 = lambda/4 + m lambda/2,
 * L2 + dz_c = n lambda/2, all r_i positive). With the displacement
 * orientation fixed above, the first-order membrane response there is
 * d rho1 / d dz_m = -i*chi with chi > 0; reversing the displacement sign
 * convention flips it to +i*chi.
 */

#include "mimpol/optics.hpp"

#include <vector>

namespace mimpol {

struct CavityConfig {
    double R1 = 0.99;             // front mirror power reflectance
    double R3 = 0.9995;           // back mirror power reflectance
    double R2 = 0.0;              // membrane power reflectance
    double membrane_loss = 0.0;   // power fraction absorbed at the membrane
    double L1 = 5e-3;             // front sub-cavity rest length, m
    double L2 = 25e-3;            // back sub-cavity rest length, m
    double dz_m = 0.0;            // membrane displacement, m (toward back mirror)
    double dz_c = 0.0;            // back mirror displacement, m (lengthens L2)
    double gamma1 = 1.0;          // front segment single-pass power factor
    double gamma2 = 1.0;          // back segment single-pass power factor
    double wavelength = 795e-9;   // m
    double laser_detuning = 0.0;  // Hz, offset from c / wavelength

    /// Membrane from film index and thickness instead of a direct R2.
    static CavityConfig with_membrane_indices(double n, double d, CavityConfig base,
                                              double absorption = membrane_absorption_default);
    static CavityConfig with_membrane_indices(double n, double d);

    double front_length() const { return L1 - dz_m; }
    double back_length() const { return L2 + dz_m + dz_c; }
    double wavenumber() const;

    void validate() const;  // throws std::invalid_argument
};

enum class ScanVariable { membrane_position, mirror_position, laser_detuning };

struct ScanAxis {
    ScanVariable variable = ScanVariable::mirror_position;
    double start = 0.0;
    double stop = 0.0;
    int points = 1;

    double value_at(int i) const;
};

/// Total reflection amplitude rho1 of the three-element system.
cplx total_reflectance(const CavityConfig& config);

/// |rho1|^2 over a 2D scan. Row-major: values[i * axis2.points + j] holds
/// the cell at axis1 value i, axis2 value j.
struct ReflectanceMap {
    ScanAxis axis1, axis2;
    std::vector<double> values;
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * axis2.points + j]; }
};
ReflectanceMap reflectance_map(const CavityConfig& config, const ScanAxis& axis1,
                               const ScanAxis& axis2, bool parallel = true);

struct ResonanceInfo {
    double position = 0.0;   // scan value at minimum reflectance
    double linewidth = 0.0;  // FWHM in scan units (w_z for mirror scans)
    double depth = 0.0;      // |rho1|^2 at the minimum
    bool undersampled = false;  // fewer than 10 samples across the FWHM
};

/// Reflectance minima along a back-mirror scan. The scan must span at least
/// one free spectral range (lambda/2 of mirror travel). Linewidths come from
/// linearly interpolated half-depth crossings; minima with depth above
/// depth_threshold are ignored. Results sorted by position.
std::vector<ResonanceInfo> find_resonances(const CavityConfig& config, const ScanAxis& scan,
                                           double depth_threshold = 0.99);

/// Front-mirror amplitude reflectivity that nulls the on-resonance
/// reflection: r1 = gamma1 (r2 - r3) / (r2 r3 - 1). Rejects r2 r3 = 1.
double impedance_match_r1(double r2, double r3, double gamma1);

struct DispersiveSlope {
    cplx finite_difference;  // d rho1 / d dz_m at the configured point, 1/m
    cplx general_expansion;  // first-order coefficient, any r1/r3/gamma1
    cplx matched_impedance;  // valid for matched r1 and r3 ~ 1
    cplx zero_loss;          // valid for gamma1 = r3 = 1
    cplx rho_at_point;       // zeroth-order term of the expansion
    bool off_max_coupling = false;  // configured point further than lambda/100 away

    double chi() const { return std::abs(finite_difference); }
};

/// Membrane-displacement response at the max-coupling point. step = 0 picks
/// the default central-difference step wavelength * 1e-6, which balances
/// truncation against rounding for chi ~ 1e9 / m in double precision.
DispersiveSlope dispersive_slope(const CavityConfig& config, double step = 0.0);

struct FrequencyResponse {
    cplx finite_difference;  // d rho1 / d f, 1/Hz
    cplx closed_form;        // valid for matched r1 and r3 ~ 1
    bool off_max_coupling = false;

    double chi_f() const { return std::abs(finite_difference); }
};

/// Laser-frequency response at the max-coupling point.
FrequencyResponse frequency_response(const CavityConfig& config, double step_hz = 100.0);

/// Free spectral range c / (2 L) of a resonator of total length L.
double fsr(double total_length);

/// Empty two-mirror finesse pi (R1 R3)^(1/4) / (1 - sqrt(R1 R3)).
double finesse_empty(double R1, double R3);

/// Rest lengths moved to the nearest max-coupling point (front sub-cavity
/// anti-resonant, back sub-cavity resonant); displacements preserved.
CavityConfig snapped_to_max_coupling(CavityConfig config);

/// Distance (m) of the configured lengths from the max-coupling condition.
double max_coupling_residual(const CavityConfig& config);

} // namespace mimpol
