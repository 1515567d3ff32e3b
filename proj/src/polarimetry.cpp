#include "mimpol/polarimetry.hpp"
#include "mimpol/constants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mimpol {

FieldPair linear_input(double alpha, double flux) {
    if (flux < 0.0)
        throw std::invalid_argument("linear_input: flux must be non-negative");
    const double a = std::sqrt(flux);
    return {a * std::cos(alpha), a * std::sin(alpha)};
}

double StokesVector::polarized_norm() const {
    return std::sqrt(Sx * Sx + Sy * Sy + Sz * Sz);
}

StokesVector stokes_from_fields(const FieldPair& f) {
    const double nh = std::norm(f.a_H);
    const double nv = std::norm(f.a_V);
    const cplx beat = std::conj(f.a_H) * f.a_V;
    return {0.5 * (nh + nv), 0.5 * (nh - nv), beat.real(), beat.imag()};
}

ReflectedField converter_reflect(const FieldPair& in, cplx rho1) {
    const double mag2 = std::norm(rho1);
    if (mag2 > 1.0 + 1e-12)
        throw std::invalid_argument("converter_reflect: |rho1| exceeds 1");
    ReflectedField out;
    out.field = {in.a_H, rho1 * in.a_V};
    out.lost_flux = std::max(0.0, 1.0 - mag2) * std::norm(in.a_V);
    return out;
}

WavePlate WavePlate::quarter(double axis_angle) {
    WavePlate p{Kind::quarter, std::fmod(axis_angle, pi)};
    if (p.axis_angle < 0.0) p.axis_angle += pi;
    return p;
}

WavePlate WavePlate::half(double axis_angle) {
    WavePlate p{Kind::half, std::fmod(axis_angle, pi)};
    if (p.axis_angle < 0.0) p.axis_angle += pi;
    return p;
}

double WavePlate::retardance() const {
    return kind == Kind::quarter ? 0.5 * pi : pi;
}

FieldPair waveplate_apply(const FieldPair& f, const WavePlate& p) {
    const double c = std::cos(p.axis_angle);
    const double s = std::sin(p.axis_angle);
    const cplx slow = std::exp(cplx(0.0, -p.retardance()));
    // R(phi) diag(1, slow) R(-phi)
    const cplx j00 = c * c + slow * s * s;
    const cplx j01 = (1.0 - slow) * s * c;
    const cplx j11 = s * s + slow * c * c;
    return {j00 * f.a_H + j01 * f.a_V, j01 * f.a_H + j11 * f.a_V};
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// rotation by -delta about the equatorial axis at angle 2*phi
Vec3 plate_rotate(const Vec3& v, double axis_angle, double delta) {
    const Vec3 n = {std::cos(2.0 * axis_angle), std::sin(2.0 * axis_angle), 0.0};
    const double cd = std::cos(delta);
    const double sd = std::sin(delta);
    const Vec3 nxv = cross(n, v);
    const double nv = dot(n, v);
    Vec3 out;
    for (int i = 0; i < 3; ++i)
        out[i] = v[i] * cd - nxv[i] * sd + n[i] * nv * (1.0 - cd);
    return out;
}

} // namespace

StokesVector waveplate_apply(const StokesVector& s, const WavePlate& p) {
    const Vec3 v = plate_rotate({s.Sx, s.Sy, s.Sz}, p.axis_angle, p.retardance());
    return {s.S0, v[0], v[1], v[2]};
}

CompensationAngles balance_compensation(const StokesVector& mean_output) {
    const double s0 = mean_output.S0;
    if (!(s0 > 0.0))
        throw std::invalid_argument("balance_compensation: empty mean state");
    if (std::abs(mean_output.Sz) >= s0 * (1.0 - 1e-9))
        throw std::invalid_argument("balance_compensation: degenerate input (fully circular mean)");

    // tangent of the signal rotation about Sx at the mean state
    Vec3 t = {0.0, -mean_output.Sz, mean_output.Sy};
    const double tn = std::sqrt(dot(t, t));
    if (tn < 1e-12 * s0)
        throw std::invalid_argument("balance_compensation: degenerate input (no phase response)");
    for (auto& c : t) c /= tn;

    // quarter-wave plate brings the tangent into the equatorial plane;
    // with t confined to the y-z plane its axis sits at +-45 degrees
    double qwp2;
    if (std::hypot(t[0], t[1]) < 1e-12)
        qwp2 = 0.5 * pi;  // canonical choice for a purely polar tangent
    else
        qwp2 = std::atan2(t[1], t[0]);
    const double qwp = 0.5 * qwp2;

    const Vec3 u = plate_rotate(t, qwp, 0.5 * pi);
    // half-wave plate reflects within the equator; the bisector with +x
    // sends the rotated tangent onto the detector axis
    const double hwp = 0.25 * std::atan2(u[1], u[0]);

    auto wrap = [](double a) {
        a = std::fmod(a, pi);
        if (a < 0.0) a += pi;
        return a;
    };
    return {wrap(qwp), wrap(hwp)};
}

double detected_imbalance(const FieldPair& f, const CompensationAngles& plates) {
    const FieldPair after_q = waveplate_apply(f, WavePlate::quarter(plates.qwp_angle));
    const FieldPair after_h = waveplate_apply(after_q, WavePlate::half(plates.hwp_angle));
    return stokes_from_fields(after_h).Sx;
}

namespace {

FieldPair detected_field(const CavityConfig& cfg, const LockScanSettings& st, double dz_c) {
    CavityConfig point = cfg;
    point.dz_c = dz_c;
    const cplx rho = total_reflectance(point);
    FieldPair f = converter_reflect(linear_input(st.alpha, st.input_flux), rho).field;
    f.a_V *= std::exp(cplx(0.0, st.phi0));
    const double root_eta = std::sqrt(st.eta);
    f.a_H *= root_eta;
    f.a_V *= root_eta;
    return f;
}

} // namespace

LockScanResult lock_scan(const CavityConfig& config, const LockScanSettings& settings,
                         double dz_c_start, double dz_c_stop, int points) {
    config.validate();
    if (points < 2)
        throw std::invalid_argument("lock_scan: need at least two samples");
    if (!(settings.eta > 0.0) || settings.eta > 1.0)
        throw std::invalid_argument("lock_scan: detection efficiency outside (0, 1]");

    LockScanResult result;
    result.span_below_fsr =
        std::abs(dz_c_stop - dz_c_start) < 0.5 * config.wavelength * (1.0 - 1e-9);

    std::vector<double> xs(points);
    std::vector<FieldPair> fields(points);
    int ref_index = 0;
    double ref_flux = -1.0;
    for (int i = 0; i < points; ++i) {
        xs[i] = dz_c_start + (dz_c_stop - dz_c_start) * i / (points - 1.0);
        fields[i] = detected_field(config, settings, xs[i]);
        if (fields[i].flux() > ref_flux) {
            ref_flux = fields[i].flux();
            ref_index = i;  // most off-resonant point
        }
    }

    result.compensation = balance_compensation(stokes_from_fields(fields[ref_index]));

    result.points.resize(points);
    for (int i = 0; i < points; ++i) {
        result.points[i] = {xs[i], fields[i].flux(),
                            detected_imbalance(fields[i], result.compensation)};
    }

    // central-slope fit at each power dip: locate the error zero crossing
    // inside the half-depth core, then fit a line over +-8% of the dip FWHM
    // around it (the wider core visibly underestimates the tangent)
    const auto& pts = result.points;
    const double step = std::abs(xs[1] - xs[0]);
    for (int i = 1; i + 1 < points; ++i) {
        if (!(pts[i].power < pts[i - 1].power && pts[i].power <= pts[i + 1].power)) continue;
        int l = i;
        while (l > 0 && pts[l - 1].power >= pts[l].power) --l;
        int r = i;
        while (r + 1 < points && pts[r + 1].power >= pts[r].power) ++r;
        const double base = 0.5 * (pts[l].power + pts[r].power);
        const double half = 0.5 * (base + pts[i].power);
        if (base - pts[i].power <= 1e-9 * base) continue;  // no visible dip

        int wl = i, wr = i;
        while (wl > l && pts[wl - 1].power < half) --wl;
        while (wr < r && pts[wr + 1].power < half) ++wr;
        if (wr - wl < 2) continue;
        const double fwhm = pts[wr].dz_c - pts[wl].dz_c;

        // error zero crossing nearest the dip minimum
        double x0 = pts[i].dz_c;
        double best_dist = 1e300;
        for (int j = wl; j < wr; ++j) {
            if (pts[j].error == 0.0 || pts[j].error * pts[j + 1].error < 0.0) {
                const double f = pts[j].error / (pts[j].error - pts[j + 1].error);
                const double x = pts[j].dz_c + f * (pts[j + 1].dz_c - pts[j].dz_c);
                if (std::abs(x - pts[i].dz_c) < best_dist) {
                    best_dist = std::abs(x - pts[i].dz_c);
                    x0 = x;
                }
            }
        }

        double radius = std::max(0.08 * std::abs(fwhm), 2.0 * step);
        int n_fit = 0;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        while (n_fit < 5 && radius < std::abs(fwhm)) {
            n_fit = 0;
            sx = sy = sxx = sxy = 0.0;
            for (int j = l; j <= r; ++j) {
                if (std::abs(pts[j].dz_c - x0) > radius) continue;
                const double x = pts[j].dz_c - x0;
                sx += x;
                sy += pts[j].error;
                sxx += x * x;
                sxy += x * pts[j].error;
                ++n_fit;
            }
            if (n_fit < 5) radius *= 1.5;
        }
        if (n_fit < 3) continue;
        const double det = n_fit * sxx - sx * sx;
        if (std::abs(det) < 1e-300) continue;
        const double slope = (n_fit * sxy - sx * sy) / det;
        const double intercept = (sy * sxx - sx * sxy) / det;
        if (slope == 0.0) continue;
        result.slopes.push_back({x0 - intercept / slope, slope});
    }
    return result;
}

} // namespace mimpol
