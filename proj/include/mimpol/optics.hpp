#pragma once
/*
 * Complex-amplitude transfer chain for stacks of partially reflecting
 * elements (mirrors, membranes) separated by free propagation with loss.
 *
 * Conventions: a lossless element parameterised by an angle theta has
 * r = sin(theta), t = i*cos(theta), so its 2x2 coupling matrix
 * [[t, r], [r, t]] is unitary. Element-specific reflection/transmission
 * phases are absorbed into the path lengths; picking another phase
 * convention shifts all resonance positions by a constant offset.
 * A propagation segment of length L carries the round-trip phase
 * exp(2ikL) and its power loss factor gamma multiplies the returned
 * amplitude once per round trip (sqrt(gamma) per single pass).
 */

#include <complex>
#include <span>
#include <vector>

namespace mimpol {

using cplx = std::complex<double>;

struct OpticalElement {
    double r = 0.0;               // amplitude reflection, real by convention
    cplx t = cplx(0.0, 1.0);      // amplitude transmission
    double intrinsic_loss = 0.0;  // power fraction absorbed at the element

    // |r|^2 + |t|^2 + loss must close to 1.
    bool is_physical(double tol = 1e-12) const;
};

/// Element from power reflectance R and absorbed fraction: r = sqrt(R),
/// t = i*sqrt(1 - R - loss). Rejects R + loss > 1 and negative inputs.
OpticalElement element_from_powers(double reflectance, double loss = 0.0);

/// Lossless element from mixing angle: r = sin(theta), t = i*cos(theta).
OpticalElement element_from_angle(double theta);

struct PropagationSegment {
    double length = 0.0;             // m
    double power_loss_factor = 1.0;  // gamma in (0, 1], single-pass power
};

struct ChainResponse {
    cplx rho;                          // total reflection amplitude
    cplx tau;                          // total transmission amplitude
    std::vector<cplx> per_element_rho; // effective rho_n seen at each element
};

/// Effective reflection/transmission of the whole stack at wavenumber k.
/// Works back to front: rho_n = r_n + t_n^2 rho'_n / (1 - r_n rho'_n) with
/// rho'_n = rho_{n+1} * gamma_n * exp(2ikL_n), seeded with rho = 0 behind
/// the last element. For lossless elements this reduces to
/// rho_n = (r_n - rho'_n) / (1 - r_n rho'_n). tau is the product of all
/// tau_n = t_n / (1 - r_n rho'_n), the single-pass loss amplitudes
/// sqrt(gamma_n) and the one-way propagation phase.
ChainResponse chain_reflectance(std::span<const OpticalElement> elements,
                                std::span<const PropagationSegment> segments,
                                double k);

inline constexpr double membrane_absorption_default = 1.6e-4;

struct MembraneCoefficients {
    double R2;  // power reflectance
    double T2;  // power transmittance, 1 - R2 - absorption
};

/// Normal-incidence reflectance of a thin dielectric film of index n and
/// thickness d at vacuum wavelength lambda:
///   R2 = (n^2-1)^2 / ((n^2+1)^2 + 4 n^2 cot^2(n k d)).
/// At the cot poles n*k*d = m*pi the limit R2 = 0 is returned exactly.
MembraneCoefficients membrane_coefficients(double n, double thickness, double wavelength,
                                           double absorption = membrane_absorption_default);

} // namespace mimpol
