// Acceptance suite: one pass/fail line per criterion, every tolerance
// pinned in code. Exits non-zero if any criterion fails.

#include "mimpol/beam.hpp"
#include "mimpol/cavity.hpp"
#include "mimpol/config.hpp"
#include "mimpol/constants.hpp"
#include "mimpol/noise.hpp"
#include "mimpol/polarimetry.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace mimpol;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& text) {
    std::printf("%s — criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, text.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* spec, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, spec, a, b, c);
    return buf;
}

constexpr double lambda = 795e-9;

CavityConfig matched_short(double r2, double r3, double gamma1) {
    CavityConfig cfg;
    const double r1 = impedance_match_r1(r2, r3, gamma1);
    cfg.R1 = r1 * r1;
    cfg.R2 = r2 * r2;
    cfg.R3 = r3 * r3;
    cfg.membrane_loss = 0.0;
    cfg.gamma1 = gamma1;
    cfg.wavelength = lambda;
    cfg.L1 = 0.25 * lambda + 10.0 * (0.5 * lambda);
    cfg.L2 = 15.0 * (0.5 * lambda);
    return cfg;
}

// --- criterion 1: finesse, formula and scanned linewidth ---

void criterion_finesse() {
    const double f_formula = finesse_empty(0.99, 0.9995);
    const bool formula_ok = std::abs(f_formula - 595.0) <= 1.0;

    const auto t0 = std::chrono::steady_clock::now();
    CavityConfig cfg;
    cfg.R1 = 0.99;
    cfg.R2 = 0.0;
    cfg.R3 = 0.9995;
    cfg.wavelength = lambda;
    cfg.L1 = 12578.0 * (0.5 * lambda);
    cfg.L2 = 62893.0 * (0.5 * lambda);
    const ScanAxis scan{ScanVariable::mirror_position, 0.0, 0.5 * lambda, 8192};
    const auto resonances = find_resonances(cfg, scan);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    bool scan_ok = false;
    double f_scan = 0.0;
    if (resonances.size() == 1 && resonances[0].linewidth > 0.0) {
        f_scan = 0.5 * lambda / resonances[0].linewidth;
        scan_ok = std::abs(f_scan - f_formula) / f_formula <= 0.02 && elapsed < 1.0;
    }
    report(1, formula_ok && scan_ok,
           fmt("finesse = %.2f (595 +- 1), scanned = %.2f within 2%%, %.3f s", f_formula,
               f_scan, elapsed));
}

// --- criterion 7: thermal variance of the fundamental peak ---

void criterion_thermal_variance() {
    const auto cavity = matched_short(std::sqrt(0.232), std::sqrt(0.9995), 0.994);
    const double chi = dispersive_slope(cavity).chi();

    MembraneConfig mc;  // 1 mm x 1 mm x 50 nm, 1.0 GPa, 3170 kg/m^3, 300 K
    mc.damping = 2.0 * pi * 10.3e3;

    DetectionConfig det;
    det.g_el = 5.24e-13;
    det.eta = 0.88;
    det.alpha = 37.5 * pi / 180.0;
    det.S0_in = DetectionConfig::s0_from_power(11.1e-6, lambda);

    const auto model = signal_psd({{1, 1}}, mc, chi, 0.0, det);

    const double f0 = mode_frequency(1, 1, mc);
    const double hwhm = mc.damping / (4.0 * pi);
    const double hi = f0 + 2000.0 * hwhm;
    const int n = 400000;
    double integral = 0.0;
    const double h = hi / n;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        integral += w * model.one_sided(i * h, NoiseKind::thermal);
    }
    integral *= h / 3.0;

    const double sy = det.S0_in * std::sin(2.0 * det.alpha);
    const double z_var = boltzmann_k * mc.temperature /
                         (mc.effective_mass() * std::pow(2.0 * pi * f0, 2));
    const double analytic = std::pow(det.g_el * det.eta * sy * chi, 2) * z_var;

    const bool consistent = std::abs(integral - analytic) / analytic < 0.01;
    const bool on_target = std::abs(integral - 1.4e-3) <= 0.1 * 1.4e-3;
    report(7, consistent && on_target,
           fmt("integrated fundamental-peak variance = %.4e V^2 (target 1.4e-3 +- 10%%; "
               "chi = %.4e /m)",
               integral, chi));
}

// --- criterion 8: closed forms vs finite differences, matched null ---

void criterion_closed_forms() {
    bool ok = true;
    std::string detail;

    // matched-impedance dispersive form at r3 = 1, centimetre lengths
    {
        CavityConfig cfg;
        cfg.R2 = 0.232;
        cfg.membrane_loss = 0.0;
        cfg.R3 = 1.0;
        cfg.gamma1 = 0.994;
        cfg.R1 = 0.994 * 0.994;
        cfg.wavelength = lambda;
        cfg.L1 = 5e-3;
        cfg.L2 = 25e-3;
        cfg = snapped_to_max_coupling(cfg);
        const auto slope = dispersive_slope(cfg);
        const double rel_matched =
            std::abs(slope.finite_difference - slope.matched_impedance) / slope.chi();
        const double rel_general =
            std::abs(slope.finite_difference - slope.general_expansion) / slope.chi();
        ok = ok && rel_matched < 0.01 && rel_general < 0.01;
        detail += fmt("chi closed/fd rel = %.1e; ", rel_matched);

        const auto fresp = frequency_response(cfg);
        const double rel_f =
            std::abs(fresp.finite_difference - fresp.closed_form) / fresp.chi_f();
        ok = ok && rel_f < 0.01;
        detail += fmt("chi_f closed/fd rel = %.1e; ", rel_f);
    }

    // general expansion at the experimental r3, matched r1
    {
        const auto cfg = matched_short(std::sqrt(0.232), std::sqrt(0.9995), 0.994);
        const auto slope = dispersive_slope(cfg);
        const double rel =
            std::abs(slope.finite_difference - slope.general_expansion) / slope.chi();
        ok = ok && rel < 0.01;

        CavityConfig cm = cfg;
        cm.L1 = 5e-3;
        cm.L2 = 25e-3;
        cm = snapped_to_max_coupling(cm);
        const double null = std::abs(total_reflectance(cm));
        ok = ok && null < 1e-6;
        detail += fmt("matched |rho| = %.1e", null);
    }
    report(8, ok, detail);
}

// --- criterion 10: synthesis / estimation round trip with aliasing ---

void criterion_round_trip() {
    MembraneConfig mc;
    mc.damping = 2.0 * pi * 10.3e3;
    DetectionConfig det;
    det.g_el = gain_from_shot_noise(2.4e-7, 0.56);
    det.eta = 0.88;
    det.alpha = 37.5 * pi / 180.0;
    det.S0_in = DetectionConfig::s0_from_power(11.1e-6, lambda);
    det.detected_power = 8.3e-6;
    det.electronic_floor = 4.6e-12;
    const double chi = 2.18e9;
    const double fs = 2.5e6;

    const auto model = signal_psd({{1, 1}}, mc, chi, 0.0, det);
    const auto trace = synthesize_trace(model, fs, 0.2, 20250810);
    const auto est = estimate_psd(trace, fs, 5000, 100);

    double sq = 0.0, worst = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < est.psd.size(); ++k) {
        const double f = est.frequency[k];
        if (f < 80e3 || f > 1e6) continue;
        const double rel = est.psd[k] / folded_one_sided(model, f, fs) - 1.0;
        sq += rel * rel;
        worst = std::max(worst, std::abs(rel));
        ++count;
    }
    const double rms = std::sqrt(sq / count);
    // 100 averages put the per-bin scatter at 10%; demand exactly that
    // statistics, with a 6-sigma cap on single bins
    const bool stats_ok = rms < 0.115 && rms > 0.07 && worst < 0.6;

    // fundamental pushed above Nyquist must fold back to fs - f
    MembraneConfig stiff = mc;
    stiff.stress = mc.stress * std::pow(1.35e6 / mode_frequency(1, 1, mc), 2);
    const auto high = signal_psd({{1, 1}}, stiff, chi, 0.0, det);
    const auto alias_trace = synthesize_trace(high, fs, 0.2, 4);
    const auto alias_est = estimate_psd(alias_trace, fs, 5000, 100);
    std::size_t peak = 0;
    for (std::size_t k = 1; k < alias_est.psd.size(); ++k)
        if (alias_est.psd[k] > alias_est.psd[peak]) peak = k;
    // the noisy peak of a 10.3 kHz wide mode wanders by a few bins
    const bool alias_ok =
        std::abs(alias_est.frequency[peak] - 1.15e6) <= 0.5 * mc.damping / (2.0 * pi);

    report(10, stats_ok && alias_ok,
           fmt("per-bin rms deviation = %.1f%% at 100 averages (chi-squared 10%%), aliased "
               "peak at %.4e Hz",
               100.0 * rms, alias_est.frequency[peak]));
}

// --- criterion 11: property suites ---

bool lossless_unitarity() {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> refl(0.0, 0.999);
    std::uniform_real_distribution<double> length(1e-6, 0.05);
    std::uniform_real_distribution<double> wavenum(1e6, 2e7);
    std::uniform_int_distribution<int> count(1, 5);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = count(rng);
        std::vector<OpticalElement> el;
        std::vector<PropagationSegment> seg;
        for (int i = 0; i < n; ++i) {
            el.push_back(element_from_powers(refl(rng)));
            if (i + 1 < n) seg.push_back({length(rng), 1.0});
        }
        const auto resp = chain_reflectance(el, seg, wavenum(rng));
        if (std::abs(std::norm(resp.rho) + std::norm(resp.tau) - 1.0) > 1e-9) return false;
    }
    return true;
}

bool waveplate_group() {
    std::mt19937 rng(78);
    std::uniform_real_distribution<double> angle(0.0, pi);
    std::uniform_real_distribution<double> amp(0.1, 2.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    for (int trial = 0; trial < 300; ++trial) {
        const double ph = phase(rng), pv = phase(rng);
        const FieldPair f{amp(rng) * cplx(std::cos(ph), std::sin(ph)),
                          amp(rng) * cplx(std::cos(pv), std::sin(pv))};
        const auto s = stokes_from_fields(f);
        const double ax = angle(rng);

        const auto half = waveplate_apply(s, WavePlate::half(ax));
        const auto twice_q = waveplate_apply(waveplate_apply(s, WavePlate::quarter(ax)),
                                             WavePlate::quarter(ax));
        if (std::abs(half.Sx - twice_q.Sx) > 1e-12 * s.S0) return false;
        if (std::abs(half.Sy - twice_q.Sy) > 1e-12 * s.S0) return false;
        if (std::abs(half.Sz - twice_q.Sz) > 1e-12 * s.S0) return false;

        const auto back = waveplate_apply(waveplate_apply(half, WavePlate::half(ax)),
                                          WavePlate::quarter(ax));
        if (std::abs(back.S0 - s.S0) > 1e-12 * s.S0) return false;
        if (std::abs(back.polarized_norm() - s.polarized_norm()) > 1e-12 * s.S0) return false;
    }
    return true;
}

bool stokes_norms() {
    std::mt19937 rng(79);
    std::uniform_real_distribution<double> amp(0.0, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    for (int trial = 0; trial < 500; ++trial) {
        const double ph = phase(rng), pv = phase(rng);
        const FieldPair f{amp(rng) * cplx(std::cos(ph), std::sin(ph)),
                          amp(rng) * cplx(std::cos(pv), std::sin(pv))};
        const auto s = stokes_from_fields(f);
        if (s.polarized_norm() > s.S0 * (1.0 + 1e-9)) return false;
        if (std::abs(s.polarized_norm() - s.S0) > 1e-9 * std::max(s.S0, 1e-30)) return false;
    }
    return true;
}

bool power_scaling() {
    MembraneConfig mc;
    mc.damping = 2.0 * pi * 10.3e3;
    auto ratio_at = [&](double power) {
        DetectionConfig det;
        det.g_el = 5.24e-13;
        det.eta = 0.88;
        det.alpha = 37.5 * pi / 180.0;
        det.S0_in = DetectionConfig::s0_from_power(power, lambda);
        const auto model = signal_psd({{1, 1}}, mc, 2.18e9, 0.0, det);
        const double f0 = mode_frequency(1, 1, mc);
        return model.one_sided(f0, NoiseKind::thermal) / model.one_sided(f0, NoiseKind::shot);
    };
    const double base = ratio_at(11.1e-6);
    return std::abs(ratio_at(22.2e-6) / base - 2.0) < 1e-9 &&
           std::abs(ratio_at(44.4e-6) / base - 4.0) < 1e-9;
}

bool config_round_trip() {
    const char* text = R"([cavity]
R1 = 0.99
R3 = 0.9995
R2 = 0.232
L1_m = 5e-3
L2_m = 25e-3
gamma1 = 0.994
lambda_m = 795e-9

[scan]
start_m = 0
stop_m = 4.2e-7
points = 2001
)";
    const Config first = Config::parse(text);
    const Config second = Config::parse(first.serialize());
    return first == second && first.serialize() == second.serialize();
}

void criterion_properties() {
    const bool a = lossless_unitarity();
    const bool b = waveplate_group();
    const bool c = stokes_norms();
    const bool d = power_scaling();
    const bool e = config_round_trip();
    report(11, a && b && c && d && e,
           std::string("unitarity ") + (a ? "ok" : "FAIL") + ", wave plates " +
               (b ? "ok" : "FAIL") + ", Stokes norms " + (c ? "ok" : "FAIL") +
               ", power scaling " + (d ? "ok" : "FAIL") + ", config round trip " +
               (e ? "ok" : "FAIL"));
}

} // namespace

int main() {
    criterion_finesse();

    {
        const double v = fsr(0.03);
        report(2, std::abs(v - 5.0e9) / 5.0e9 <= 1e-3,
               fmt("fsr(0.03 m) = %.6e Hz (5.0 GHz +- 0.1%%)", v));
    }
    {
        const auto mc = membrane_coefficients(2.0245, 50e-9, lambda);
        report(3, std::abs(mc.R2 - 0.232) <= 1e-3,
               fmt("membrane R2 = %.5f (0.232 +- 0.001)", mc.R2));
    }
    {
        const AlignmentGeometry g{4e-3, 0.3, lambda, 0.7e-3};
        const double eta13 = overlap_tilted(tilt_wavenumber(g, 1.3e-3).approx, g.waist);
        const double eta07 = overlap_tilted(tilt_wavenumber(g, 0.7e-3).approx, g.waist);
        bool ok = eta13 >= 0.95 && std::abs(eta13 - 0.95) <= 0.002;
        ok = ok && eta07 >= 0.985 && std::abs(eta07 - 0.985) <= 0.002;
        for (double dz : {1.3e-3, 0.7e-3}) {
            const double dk = tilt_wavenumber(g, dz).approx;
            const double numeric =
                overlap_numeric({g.waist, 0.0, 0.0, 0.0}, {g.waist, dk, 0.0, 0.0});
            ok = ok && std::abs(numeric - overlap_tilted(dk, g.waist)) <= 1e-5;
        }
        report(4, ok, fmt("eta_r(1.3 mm) = %.5f >= 0.95, eta_r(0.7 mm) = %.5f >= 0.985, "
                          "quadrature agrees to 1e-5",
                          eta13, eta07));
    }
    {
        MembraneConfig mc;
        const double f0 = mode_frequency(1, 1, mc);
        report(5, std::abs(f0 - 397e3) <= 1e3, fmt("fundamental = %.1f Hz (397 kHz +- 1 kHz)", f0));
    }
    {
        const double g_el = gain_from_shot_noise(2.4e-7, 0.56);
        const double eta = quantum_efficiency(0.56, lambda);
        const bool ok =
            std::abs(g_el - 5.24e-13) / 5.24e-13 <= 0.01 && std::abs(eta - 0.88) <= 0.01;
        report(6, ok, fmt("g_el = %.4e V/Hz (5.24e-13 +- 1%%), eta = %.4f (0.88 +- 0.01)",
                          g_el, eta));
    }

    criterion_thermal_variance();
    criterion_closed_forms();

    {
        DetectionConfig det;
        det.g_el = gain_from_shot_noise(2.4e-7, 0.56);
        det.eta = quantum_efficiency(0.56, lambda);
        det.alpha = 37.5 * pi / 180.0;
        det.S0_in = DetectionConfig::s0_from_power(11.1e-6, lambda);
        det.detected_power = 8.3e-6;
        det.electronic_floor = 4.6e-12;
        MembraneConfig mc;
        const auto model = signal_psd({}, mc, 0.0, 0.0, det);
        const double shot = model.one_sided(4e5, NoiseKind::shot);
        const double electronic = model.one_sided(4e5, NoiseKind::electronic);
        const bool ok = std::abs(shot - 2.0e-12) / 2.0e-12 <= 0.05 && electronic == 4.6e-12;
        report(9, ok, fmt("shot = %.4e V^2/Hz at 8.3 uW (2.0e-12 +- 5%%), electronic floor "
                          "echoed = %.2e",
                          shot, electronic));
    }

    criterion_round_trip();
    criterion_properties();

    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
