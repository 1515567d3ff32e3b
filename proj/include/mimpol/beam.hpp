#pragma once
/*
 * Gaussian-beam alignment calculus for the displacer / imaging lens /
 * cavity interferometer. A lens-mirror distance error dz displaces the
 * returning reference beam by 2 dz d / f_i and tilts it by the same ratio
 * over f_i, so signal and reference differ in transverse momentum
 * dk ~ 4 pi d dz / (lambda f_i^2) where they intersect.
 *
 * The closed-form overlap assumes collimated beams (radii of curvature
 * -> infinity), i.e. w^2 pi / lambda >> f_i. overlap_numeric is the
 * quadrature fallback when tilt, offset and divergence all matter.
 */

#include <complex>

namespace mimpol {

struct AlignmentGeometry {
    double beam_separation = 4e-3;  // d, m
    double focal_length = 0.3;      // f_i, m
    double wavelength = 795e-9;     // m
    double waist = 0.7e-3;          // w, m (amplitude 1/e radius; 2w = 1/e^2 width)

    void validate() const;
};

struct TiltWavenumber {
    double approx;  // 4 pi d dz / (lambda f_i^2), rad/m
    double exact;   // (2 pi / lambda) sin(atan(2 d dz / f_i^2))
    bool outside_small_angle;  // |2 d dz / f_i^2| >= 0.1
};

/// Transverse wavenumber difference between signal and reference beams for
/// a lens placement error dz. Odd in dz.
TiltWavenumber tilt_wavenumber(const AlignmentGeometry& g, double dz);

/// Mode overlap of two equal-waist beams differing by a tilt wavenumber:
/// eta_r = exp(-dk^2 w^2 / 8).
double overlap_tilted(double delta_k, double waist);

struct GaussianBeamSpec {
    double waist = 1.0;            // m
    double tilt = 0.0;             // transverse wavenumber k_x, rad/m
    double offset = 0.0;           // lateral displacement along x, m
    double curvature_phase = 0.0;  // k / (2 R), rad/m^2; 0 for collimated
};

/// Amplitude overlap |<a|b>| of two normalised Gaussian modes by nested
/// adaptive quadrature over a [-6 w, 6 w] window (absolute error < abs_tol).
/// Throws std::runtime_error when the quadrature fails to converge.
double overlap_numeric(const GaussianBeamSpec& a, const GaussianBeamSpec& b,
                       double abs_tol = 1e-6);

/// Largest lens placement error that keeps the overlap at target_eta;
/// inverse of overlap_tilted(tilt_wavenumber(.)).
double lens_tolerance(double target_eta, const AlignmentGeometry& g);

} // namespace mimpol
