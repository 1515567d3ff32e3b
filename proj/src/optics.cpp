#include "mimpol/optics.hpp"
#include "mimpol/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace mimpol {

bool OpticalElement::is_physical(double tol) const {
    const double budget = r * r + std::norm(t) + intrinsic_loss;
    return std::abs(budget - 1.0) <= tol && intrinsic_loss >= -tol;
}

OpticalElement element_from_powers(double reflectance, double loss) {
    if (reflectance < 0.0 || loss < 0.0)
        throw std::invalid_argument("element_from_powers: negative input");
    if (reflectance + loss > 1.0 + 1e-15)
        throw std::invalid_argument("element_from_powers: R + loss exceeds 1");
    const double transmittance = std::max(0.0, 1.0 - reflectance - loss);
    return {std::sqrt(reflectance), cplx(0.0, std::sqrt(transmittance)), loss};
}

OpticalElement element_from_angle(double theta) {
    return {std::sin(theta), cplx(0.0, std::cos(theta)), 0.0};
}

ChainResponse chain_reflectance(std::span<const OpticalElement> elements,
                                std::span<const PropagationSegment> segments,
                                double k) {
    if (elements.empty())
        throw std::invalid_argument("chain_reflectance: empty element list");
    if (segments.size() + 1 != elements.size())
        throw std::invalid_argument(
            "chain_reflectance: need exactly one segment between consecutive elements");
    if (!(k > 0.0))
        throw std::invalid_argument("chain_reflectance: wavenumber must be positive");
    for (const auto& seg : segments) {
        if (seg.length < 0.0)
            throw std::invalid_argument("chain_reflectance: negative segment length");
        if (!(seg.power_loss_factor > 0.0) || seg.power_loss_factor > 1.0)
            throw std::invalid_argument("chain_reflectance: loss factor outside (0, 1]");
    }

    const std::size_t n_el = elements.size();
    std::vector<cplx> per(n_el);
    cplx rho_after(0.0, 0.0);  // empty space behind the final element
    cplx tau_product(1.0, 0.0);

    for (std::size_t i = n_el; i-- > 0;) {
        cplx rho_prime(0.0, 0.0);
        if (i + 1 < n_el) {
            const auto& seg = segments[i];
            rho_prime = rho_after * seg.power_loss_factor *
                        std::exp(cplx(0.0, 2.0 * k * seg.length));
        }
        const auto& el = elements[i];
        const cplx denom = 1.0 - el.r * rho_prime;
        per[i] = el.r + el.t * el.t * rho_prime / denom;
        tau_product *= el.t / denom;
        rho_after = per[i];
    }

    for (const auto& seg : segments)
        tau_product *= std::sqrt(seg.power_loss_factor) *
                       std::exp(cplx(0.0, k * seg.length));

    return {per.front(), tau_product, std::move(per)};
}

MembraneCoefficients membrane_coefficients(double n, double thickness, double wavelength,
                                           double absorption) {
    if (!(n > 1.0))
        throw std::invalid_argument("membrane_coefficients: index must exceed 1");
    if (!(thickness > 0.0) || !(wavelength > 0.0))
        throw std::invalid_argument("membrane_coefficients: thickness and wavelength must be positive");
    if (absorption < 0.0 || absorption >= 1.0)
        throw std::invalid_argument("membrane_coefficients: absorption outside [0, 1)");

    const double phase = n * (2.0 * pi / wavelength) * thickness;
    const double n2 = n * n;
    double R2 = 0.0;
    const double s = std::sin(phase);
    if (std::abs(s) > 1e-12) {
        const double cot = std::cos(phase) / s;
        R2 = (n2 - 1.0) * (n2 - 1.0) /
             ((n2 + 1.0) * (n2 + 1.0) + 4.0 * n2 * cot * cot);
    }
    // else: cot^2 diverges, R2 -> 0 in the limit
    const double T2 = 1.0 - R2 - absorption;
    if (T2 < 0.0)
        throw std::invalid_argument("membrane_coefficients: absorption exceeds 1 - R2");
    return {R2, T2};
}

} // namespace mimpol
