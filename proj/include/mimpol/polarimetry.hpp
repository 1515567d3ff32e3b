#pragma once
/*
 * Polarimetric signal chain: the resonator reflects the vertical (signal)
 * component with a complex coefficient while the horizontal (reference)
 * component returns untouched; wave plates rotate the state on the
 * Poincare sphere and a polarizing splitter plus balanced detector pair
 * reads out the resulting H/V flux imbalance.
 *
 * Amplitudes are in sqrt(photons/s); Stokes components are half the photon
 * flux differences, S0 = (|aH|^2 + |aV|^2) / 2, Sx = (|aH|^2 - |aV|^2) / 2,
 * Sy = Re(aH* aV), Sz = Im(aH* aV), so Sz = +S0 for left-circular light
 * with aV = +i aH. A relative phase shift of aV rotates (Sy, Sz) about the
 * Sx axis. Quantum fluctuations are not carried here; only mean fields.
 * Their stationary spectra live in the noise module.
 *
 * Wave plates: a plate with fast axis at angle phi (from H) and retardance
 * delta acts on fields as R(phi) diag(1, exp(-i delta)) R(-phi) and on
 * Stokes space as the rotation by -delta about the equatorial axis at 2 phi.
 * With this sign a quarter-wave plate at 45 degrees maps Sx to +Sz.
 */

#include "mimpol/cavity.hpp"

#include <complex>
#include <vector>

namespace mimpol {

struct FieldPair {
    cplx a_H;  // reference, fully reflected
    cplx a_V;  // signal, enters the resonator

    double flux() const { return std::norm(a_H) + std::norm(a_V); }
};

/// Linearly polarized input at angle alpha from H carrying the given
/// total photon flux.
FieldPair linear_input(double alpha, double flux = 1.0);

struct StokesVector {
    double S0 = 0.0;
    double Sx = 0.0;
    double Sy = 0.0;
    double Sz = 0.0;

    double polarized_norm() const;  // sqrt(Sx^2 + Sy^2 + Sz^2)
};

StokesVector stokes_from_fields(const FieldPair& f);

struct ReflectedField {
    FieldPair field;
    double lost_flux;  // (1 - |rho1|^2) |aV|^2, photons/s
};

/// Mean-field action of the resonator: aH unchanged, aV scaled by rho1.
/// Rejects |rho1| > 1.
ReflectedField converter_reflect(const FieldPair& in, cplx rho1);

struct WavePlate {
    enum class Kind { quarter, half };
    Kind kind = Kind::quarter;
    double axis_angle = 0.0;  // fast axis from H, radians, normalised to [0, pi)

    static WavePlate quarter(double axis_angle);
    static WavePlate half(double axis_angle);
    double retardance() const;
};

FieldPair waveplate_apply(const FieldPair& f, const WavePlate& p);
StokesVector waveplate_apply(const StokesVector& s, const WavePlate& p);

struct CompensationAngles {
    double qwp_angle;
    double hwp_angle;
};

/// Plate angles that null the detected H/V imbalance for the given mean
/// state and make the first-order response to a signal phase shift maximal
/// (equal to sqrt(Sy^2 + Sz^2)). Throws on degenerate input: a fully
/// circular mean, or one with no phase response (Sy = Sz = 0).
CompensationAngles balance_compensation(const StokesVector& mean_output);

/// Detected H/V flux imbalance (half-flux units) behind the two plates.
double detected_imbalance(const FieldPair& f, const CompensationAngles& plates);

struct LockScanPoint {
    double dz_c;   // m
    double power;  // total photon flux at the detector pair, photons/s
    double error;  // balanced detector output, half-flux units
};

struct ResonanceSlopeFit {
    double position;  // zero crossing of the error signal, m
    double slope;     // fitted central slope, half-flux per m
};

struct LockScanResult {
    std::vector<LockScanPoint> points;
    CompensationAngles compensation;        // set at the most off-resonant point
    std::vector<ResonanceSlopeFit> slopes;  // one linear fit per resonance
    bool span_below_fsr = false;            // scan shorter than lambda/2
};

struct LockScanSettings {
    double alpha = 0.0;       // input polarization angle, rad
    double phi0 = 0.0;        // static phase offset picked up by the signal beam
    double eta = 1.0;         // common detection efficiency, applied upstream
    double input_flux = 1.0;  // photons/s
};

/// Back-mirror scan across resonance: total detected power and the
/// compensated dispersive error signal, plus a linear fit of the central
/// slope at each resonance for sensitivity calibration.
LockScanResult lock_scan(const CavityConfig& config, const LockScanSettings& settings,
                         double dz_c_start, double dz_c_stop, int points);

} // namespace mimpol
