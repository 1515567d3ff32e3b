#include "mimpol/beam.hpp"
#include "mimpol/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace mimpol {

void AlignmentGeometry::validate() const {
    if (!(beam_separation > 0.0) || !(focal_length > 0.0) || !(wavelength > 0.0) ||
        !(waist > 0.0))
        throw std::invalid_argument("AlignmentGeometry: all lengths must be positive");
}

TiltWavenumber tilt_wavenumber(const AlignmentGeometry& g, double dz) {
    g.validate();
    const double ratio = 2.0 * g.beam_separation * dz / (g.focal_length * g.focal_length);
    TiltWavenumber out;
    out.approx = 2.0 * pi * ratio / g.wavelength;
    out.exact = (2.0 * pi / g.wavelength) * std::sin(std::atan(ratio));
    out.outside_small_angle = std::abs(ratio) >= 0.1;
    return out;
}

double overlap_tilted(double delta_k, double waist) {
    if (!(waist > 0.0))
        throw std::invalid_argument("overlap_tilted: waist must be positive");
    const double arg = delta_k * waist;
    return std::exp(-arg * arg / 8.0);
}

double lens_tolerance(double target_eta, const AlignmentGeometry& g) {
    g.validate();
    if (!(target_eta > 0.0) || !(target_eta < 1.0))
        throw std::invalid_argument("lens_tolerance: target overlap must lie in (0, 1)");
    const double dk_max = std::sqrt(-8.0 * std::log(target_eta)) / g.waist;
    return dk_max * g.wavelength * g.focal_length * g.focal_length /
           (4.0 * pi * g.beam_separation);
}

namespace detail {

// adaptive Simpson on a complex integrand; slivers that exhaust the depth
// budget contribute their residual to `leftover` instead of aborting, which
// keeps nested integration stable against the inner level's noise floor

template <class F>
std::complex<double> adaptive_simpson(const F& f, double a, double b,
                                      std::complex<double> fa, std::complex<double> fm,
                                      std::complex<double> fb, std::complex<double> whole,
                                      double tol, int depth, double& leftover) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const std::complex<double> flm = f(lm);
    const std::complex<double> frm = f(rm);
    const std::complex<double> left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const std::complex<double> right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const std::complex<double> delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    if (depth <= 0) {
        leftover += std::abs(delta);
        return left + right + delta / 15.0;
    }
    const double child_tol = std::max(0.5 * tol, 1e-16);
    return adaptive_simpson(f, a, m, fa, flm, fm, left, child_tol, depth - 1, leftover) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, child_tol, depth - 1, leftover);
}

template <class F>
std::complex<double> integrate(const F& f, double a, double b, double tol, double& leftover) {
    const std::complex<double> fa = f(a);
    const std::complex<double> fm = f(0.5 * (a + b));
    const std::complex<double> fb = f(b);
    const std::complex<double> whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 24, leftover);
}

} // namespace detail

namespace {

std::complex<double> mode_amplitude(const GaussianBeamSpec& s, double x, double y) {
    const double dx = x - s.offset;
    const double r2 = dx * dx + y * y;
    const double norm = std::sqrt(2.0 / pi) / s.waist;
    const double phase = s.tilt * x + s.curvature_phase * r2;
    return norm * std::exp(-r2 / (s.waist * s.waist)) *
           std::complex<double>(std::cos(phase), std::sin(phase));
}

// <a|b> over [-extent, extent]^2, coordinates scaled by the larger waist so
// the integrand is O(1) and the absolute tolerances are meaningful
std::complex<double> overlap_integral(const GaussianBeamSpec& a, const GaussianBeamSpec& b,
                                      double tol, double& leftover) {
    const double s = std::max(a.waist, b.waist);
    const double extent = 6.0 + (std::abs(a.offset) + std::abs(b.offset)) / s;
    auto scaled = [&](double u, double v) {
        return std::conj(mode_amplitude(a, s * u, s * v)) * mode_amplitude(b, s * u, s * v) *
               (s * s);
    };
    double inner_leftover = 0.0;
    auto outer = [&](double v) {
        auto inner = [&](double u) { return scaled(u, v); };
        return detail::integrate(inner, -extent, extent, tol / (4.0 * extent), inner_leftover);
    };
    auto result = detail::integrate(outer, -extent, extent, tol, leftover);
    leftover += inner_leftover;
    return result;
}

} // namespace

double overlap_numeric(const GaussianBeamSpec& a, const GaussianBeamSpec& b, double abs_tol) {
    if (!(a.waist > 0.0) || !(b.waist > 0.0))
        throw std::invalid_argument("overlap_numeric: waists must be positive");
    if (!(abs_tol > 0.0))
        throw std::invalid_argument("overlap_numeric: tolerance must be positive");
    double leftover = 0.0;
    const double tol = abs_tol / 40.0;  // per-level budget well under the target
    const std::complex<double> iab = overlap_integral(a, b, tol, leftover);
    const std::complex<double> iaa = overlap_integral(a, a, tol, leftover);
    const std::complex<double> ibb = overlap_integral(b, b, tol, leftover);
    if (leftover > abs_tol)
        throw std::runtime_error("overlap_numeric: quadrature did not converge");
    return std::abs(iab) / std::sqrt(iaa.real() * ibb.real());
}

} // namespace mimpol
