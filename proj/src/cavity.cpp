#include "mimpol/cavity.hpp"
#include "mimpol/constants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace mimpol {

CavityConfig CavityConfig::with_membrane_indices(double n, double d, CavityConfig base,
                                                 double absorption) {
    const auto mc = membrane_coefficients(n, d, base.wavelength, absorption);
    base.R2 = mc.R2;
    base.membrane_loss = absorption;
    return base;
}

CavityConfig CavityConfig::with_membrane_indices(double n, double d) {
    return with_membrane_indices(n, d, CavityConfig{});
}

double CavityConfig::wavenumber() const {
    return 2.0 * pi / wavelength + 2.0 * pi * laser_detuning / speed_of_light;
}

void CavityConfig::validate() const {
    if (R1 < 0.0 || R1 > 1.0 || R2 < 0.0 || R2 > 1.0 || R3 < 0.0 || R3 > 1.0)
        throw std::invalid_argument("CavityConfig: reflectances must lie in [0, 1]");
    if (membrane_loss < 0.0 || R2 + membrane_loss > 1.0 + 1e-15)
        throw std::invalid_argument("CavityConfig: membrane loss budget exceeded");
    if (!(front_length() > 0.0))
        throw std::invalid_argument("CavityConfig: front sub-cavity length must stay positive");
    if (!(back_length() > 0.0))
        throw std::invalid_argument("CavityConfig: back sub-cavity length must stay positive");
    if (!(gamma1 > 0.0) || gamma1 > 1.0 || !(gamma2 > 0.0) || gamma2 > 1.0)
        throw std::invalid_argument("CavityConfig: loss factors must lie in (0, 1]");
    if (!(wavelength > 0.0))
        throw std::invalid_argument("CavityConfig: wavelength must be positive");
    if (!(wavenumber() > 0.0))
        throw std::invalid_argument("CavityConfig: detuning drives wavenumber non-positive");
}

double ScanAxis::value_at(int i) const {
    if (points <= 1) return start;
    return start + (stop - start) * static_cast<double>(i) / (points - 1);
}

namespace {

CavityConfig with_axis_value(CavityConfig cfg, ScanVariable var, double value) {
    switch (var) {
        case ScanVariable::membrane_position: cfg.dz_m = value; break;
        case ScanVariable::mirror_position: cfg.dz_c = value; break;
        case ScanVariable::laser_detuning: cfg.laser_detuning = value; break;
    }
    return cfg;
}

// half-wavelength grid distance, wrapped into [-period/2, period/2)
double grid_distance(double x, double offset, double period) {
    double d = std::fmod(x - offset, period);
    if (d < -0.5 * period) d += period;
    if (d >= 0.5 * period) d -= period;
    return d;
}

} // namespace

cplx total_reflectance(const CavityConfig& config) {
    config.validate();
    const std::array<OpticalElement, 3> elements = {
        element_from_powers(config.R1),
        element_from_powers(config.R2, config.membrane_loss),
        element_from_powers(config.R3),
    };
    const std::array<PropagationSegment, 2> segments = {{
        {config.front_length(), config.gamma1},
        {config.back_length(), config.gamma2},
    }};
    return chain_reflectance(elements, segments, config.wavenumber()).rho;
}

ReflectanceMap reflectance_map(const CavityConfig& config, const ScanAxis& axis1,
                               const ScanAxis& axis2, bool parallel) {
    config.validate();
    if (axis1.points < 1 || axis2.points < 1)
        throw std::invalid_argument("reflectance_map: axes need at least one sample");

    ReflectanceMap map{axis1, axis2, {}};
    map.values.assign(static_cast<std::size_t>(axis1.points) * axis2.points, 0.0);

    auto fill_rows = [&](int row_begin, int row_end) {
        for (int i = row_begin; i < row_end; ++i) {
            const CavityConfig row_cfg =
                with_axis_value(config, axis1.variable, axis1.value_at(i));
            for (int j = 0; j < axis2.points; ++j) {
                const CavityConfig cell_cfg =
                    with_axis_value(row_cfg, axis2.variable, axis2.value_at(j));
                map.values[static_cast<std::size_t>(i) * axis2.points + j] =
                    std::norm(total_reflectance(cell_cfg));
            }
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int n_threads = parallel ? static_cast<int>(std::min<unsigned>(hw, axis1.points)) : 1;
    if (n_threads <= 1) {
        fill_rows(0, axis1.points);
        return map;
    }
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    const int chunk = (axis1.points + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(axis1.points, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back(fill_rows, begin, end);
    }
    for (auto& w : workers) w.join();
    return map;
}

std::vector<ResonanceInfo> find_resonances(const CavityConfig& config, const ScanAxis& scan,
                                           double depth_threshold) {
    config.validate();
    if (scan.variable != ScanVariable::mirror_position)
        throw std::invalid_argument("find_resonances: scan variable must be the back mirror position");
    if (scan.points < 5)
        throw std::invalid_argument("find_resonances: too few samples");
    const double span = std::abs(scan.stop - scan.start);
    if (span < 0.5 * config.wavelength * (1.0 - 1e-9))
        throw std::invalid_argument("find_resonances: scan must span at least lambda/2");

    const int n = scan.points;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = scan.value_at(i);
        y[i] = std::norm(total_reflectance(with_axis_value(config, scan.variable, x[i])));
    }
    const double step = std::abs(x[1] - x[0]);

    std::vector<ResonanceInfo> out;
    for (int i = 1; i + 1 < n; ++i) {
        if (!(y[i] < y[i - 1] && y[i] <= y[i + 1])) continue;

        // parabolic refinement of the minimum
        const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
        double pos = x[i];
        double depth = y[i];
        if (denom > 0.0) {
            const double shift = 0.5 * (y[i - 1] - y[i + 1]) / denom;
            pos = x[i] + shift * (x[i + 1] - x[i]);
            depth = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift;
        }
        if (depth >= depth_threshold) continue;

        // local baseline: nearest maxima (or scan edges) on either side
        int l = i;
        while (l > 0 && y[l - 1] >= y[l]) --l;
        int r = i;
        while (r + 1 < n && y[r + 1] >= y[r]) ++r;
        const double base = 0.5 * (y[l] + y[r]);
        const double half = 0.5 * (base + depth);

        // interpolated half-depth crossings
        double left = x[l];
        for (int j = i; j > l; --j) {
            if (y[j - 1] >= half && y[j] < half) {
                const double f = (half - y[j - 1]) / (y[j] - y[j - 1]);
                left = x[j - 1] + f * (x[j] - x[j - 1]);
                break;
            }
        }
        double right = x[r];
        for (int j = i; j < r; ++j) {
            if (y[j] < half && y[j + 1] >= half) {
                const double f = (half - y[j]) / (y[j + 1] - y[j]);
                right = x[j] + f * (x[j + 1] - x[j]);
                break;
            }
        }
        ResonanceInfo info;
        info.position = pos;
        info.linewidth = right - left;
        info.depth = std::max(0.0, depth);
        info.undersampled = info.linewidth < 10.0 * step;
        out.push_back(info);
    }
    std::sort(out.begin(), out.end(),
              [](const ResonanceInfo& a, const ResonanceInfo& b) { return a.position < b.position; });
    return out;
}

double impedance_match_r1(double r2, double r3, double gamma1) {
    const double denom = r2 * r3 - 1.0;
    if (std::abs(denom) < 1e-15)
        throw std::invalid_argument("impedance_match_r1: r2 r3 = 1 has no matched front mirror");
    return gamma1 * (r2 - r3) / denom;
}

double max_coupling_residual(const CavityConfig& config) {
    const double half = 0.5 * config.wavelength;
    const double d1 = grid_distance(config.front_length(), 0.25 * config.wavelength, half);
    const double d2 = grid_distance(config.back_length(), 0.0, half);
    return std::max(std::abs(d1), std::abs(d2));
}

CavityConfig snapped_to_max_coupling(CavityConfig config) {
    const double half = 0.5 * config.wavelength;
    config.L1 -= grid_distance(config.front_length(), 0.25 * config.wavelength, half);
    config.L2 -= grid_distance(config.back_length(), 0.0, half);
    config.validate();
    return config;
}

DispersiveSlope dispersive_slope(const CavityConfig& config, double step) {
    config.validate();
    const double h = step > 0.0 ? step : config.wavelength * 1e-6;

    DispersiveSlope out;
    out.off_max_coupling = max_coupling_residual(config) > config.wavelength / 100.0;

    CavityConfig plus = config, minus = config;
    plus.dz_m += h;
    minus.dz_m -= h;
    out.finite_difference = (total_reflectance(plus) - total_reflectance(minus)) / (2.0 * h);

    const double r1 = std::sqrt(config.R1);
    const double r2 = std::sqrt(config.R2);
    const double r3 = std::sqrt(config.R3);
    const double g1 = config.gamma1;
    const double lam = config.wavelength;

    const double denom = (1.0 - r2 * r3) + r1 * g1 * (r2 - r3);
    out.rho_at_point = (r1 * (1.0 - r2 * r3) + g1 * (r2 - r3)) / denom;
    out.general_expansion = cplx(0.0, -4.0 * pi / lam) * (1.0 - r1 * r1) * g1 * r2 *
                            (1.0 + r3 * r3 - 2.0 * r2 * r3) / (denom * denom);
    out.matched_impedance =
        cplx(0.0, -8.0 * pi / lam) * g1 / (1.0 - g1 * g1) * r2 / (1.0 - r2);
    out.zero_loss =
        cplx(0.0, -8.0 * pi / lam) * (1.0 + r1) / (1.0 - r1) * r2 / (1.0 - r2);
    return out;
}

FrequencyResponse frequency_response(const CavityConfig& config, double step_hz) {
    config.validate();

    FrequencyResponse out;
    out.off_max_coupling = max_coupling_residual(config) > config.wavelength / 100.0;

    CavityConfig plus = config, minus = config;
    plus.laser_detuning += step_hz;
    minus.laser_detuning -= step_hz;
    out.finite_difference =
        (total_reflectance(plus) - total_reflectance(minus)) / (2.0 * step_hz);

    const double r2 = std::sqrt(config.R2);
    const double g1 = config.gamma1;
    out.closed_form = cplx(0.0, -4.0 * pi / speed_of_light) *
                      ((1.0 - r2) * config.front_length() + (1.0 + r2) * config.back_length()) /
                      (1.0 - r2) * g1 / (1.0 - g1 * g1);
    return out;
}

double fsr(double total_length) {
    if (!(total_length > 0.0))
        throw std::invalid_argument("fsr: length must be positive");
    return speed_of_light / (2.0 * total_length);
}

double finesse_empty(double R1, double R3) {
    if (!(R1 > 0.0) || R1 >= 1.0 || !(R3 > 0.0) || R3 >= 1.0)
        throw std::invalid_argument("finesse_empty: reflectances must lie in (0, 1)");
    const double root = std::sqrt(R1 * R3);
    return pi * std::pow(R1 * R3, 0.25) / (1.0 - root);
}

} // namespace mimpol
