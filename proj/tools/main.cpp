/*
 * Command-line front end: runs reflectance maps, lock scans, noise spectra
 * and alignment tables from a structured-text config and writes CSV.
 * Exit codes: 0 ok, 1 runtime failure, 2 invalid config.
 */

#include "mimpol/beam.hpp"
#include "mimpol/cavity.hpp"
#include "mimpol/config.hpp"
#include "mimpol/constants.hpp"
#include "mimpol/csv.hpp"
#include "mimpol/noise.hpp"
#include "mimpol/polarimetry.hpp"

#include <CLI11.hpp>

#include <clocale>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace mimpol;

std::string axis_name(ScanVariable v) {
    switch (v) {
        case ScanVariable::membrane_position: return "dz_m";
        case ScanVariable::mirror_position: return "dz_c";
        case ScanVariable::laser_detuning: return "laser_detuning";
    }
    return "?";
}

std::string axis_column(ScanVariable v) {
    return v == ScanVariable::laser_detuning ? axis_name(v) + "_Hz" : axis_name(v) + "_m";
}

std::string axis_meta(const char* tag, const ScanAxis& axis) {
    std::ostringstream os;
    os << tag << ": " << axis_name(axis.variable) << " start=" << axis.start
       << " stop=" << axis.stop << " points=" << axis.points;
    return os.str();
}

int cmd_map(const std::string& config_path, const std::string& out_path) {
    const Config cfg = Config::parse_file(config_path);
    const CavityConfig cavity = cavity_from_config(cfg);
    if (!cfg.has_section("map")) throw ConfigError("missing [map] section");
    const ScanAxis axis1 = scan_axis_from_config(cfg, "map", "axis1");
    const ScanAxis axis2 = scan_axis_from_config(cfg, "map", "axis2");

    const ReflectanceMap map = reflectance_map(cavity, axis1, axis2);

    CsvWriter csv(out_path);
    csv.comment("command: map");
    csv.comment(axis_meta("axis1", axis1));
    csv.comment(axis_meta("axis2", axis2));
    const std::string columns[] = {axis_column(axis1.variable), axis_column(axis2.variable),
                                   "reflectance"};
    csv.header(columns);
    for (int i = 0; i < axis1.points; ++i)
        for (int j = 0; j < axis2.points; ++j)
            csv.row({axis1.value_at(i), axis2.value_at(j), map.at(i, j)});
    return 0;
}

int cmd_scan(const std::string& config_path, const std::string& out_path) {
    const Config cfg = Config::parse_file(config_path);
    const CavityConfig cavity = cavity_from_config(cfg);
    const DetectionConfig det = detection_from_config(cfg);
    if (!cfg.has_section("scan")) throw ConfigError("missing [scan] section");
    const double start = cfg.get_double("scan", "start_m");
    const double stop = cfg.get_double("scan", "stop_m");
    const int points = static_cast<int>(cfg.get_int("scan", "points"));
    const double phi0 = cfg.get_double("scan", "phi0_rad", 0.0);

    LockScanSettings settings;
    settings.alpha = det.alpha;
    settings.phi0 = phi0;
    settings.eta = det.eta;
    settings.input_flux = 2.0 * det.S0_in;

    const LockScanResult scan = lock_scan(cavity, settings, start, stop, points);
    if (scan.span_below_fsr)
        std::cerr << "warning: scan span is below one free spectral range (lambda/2)\n";

    const double photon_energy = planck_h * speed_of_light / cavity.wavelength;
    CsvWriter csv(out_path);
    csv.comment("command: scan");
    {
        std::ostringstream os;
        os << "alpha_rad=" << det.alpha << " phi0_rad=" << phi0 << " eta=" << det.eta
           << " input_flux_per_s=" << settings.input_flux;
        csv.comment(os.str());
    }
    const std::string columns[] = {"dz_c_m", "power_W", "error_V"};
    csv.header(columns);
    for (const auto& p : scan.points)
        csv.row({p.dz_c, p.power * photon_energy, p.error * det.g_el});

    for (const auto& fit : scan.slopes)
        std::printf("resonance at dz_c = %.6e m: error slope %.6e V/m\n", fit.position,
                    fit.slope * det.g_el);
    return 0;
}

LaserFrequencyNoise load_laser_noise(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open laser noise table: " + path);
    LaserFrequencyNoise table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        double f, g;
        char comma;
        if (row >> f >> comma >> g) {
            table.frequency.push_back(f);
            table.psd_one_sided.push_back(g);
        }
    }
    table.validate();
    return table;
}

int cmd_spectrum(const std::string& config_path, const std::string& out_path, bool with_trace,
                 std::uint64_t seed) {
    const Config cfg = Config::parse_file(config_path);
    CavityConfig cavity = cavity_from_config(cfg);
    const MembraneConfig membrane = membrane_from_config(cfg);
    const DetectionConfig det = detection_from_config(cfg);
    if (!cfg.has_section("spectrum")) throw ConfigError("missing [spectrum] section");
    const double f_start = cfg.get_double("spectrum", "f_start_Hz");
    const double f_stop = cfg.get_double("spectrum", "f_stop_Hz");
    const int points = static_cast<int>(cfg.get_int("spectrum", "points"));
    const int order = static_cast<int>(cfg.get_int("spectrum", "mode_order_max", 2));
    const double duration = cfg.get_double("spectrum", "duration_s", 0.2);
    const double highpass = cfg.get_double("spectrum", "highpass_Hz", 0.0);
    if (points < 2 || f_stop <= f_start)
        throw ConfigError("[spectrum]: need points >= 2 and f_stop_Hz > f_start_Hz");

    if (cfg.get_bool("spectrum", "snap_max_coupling", true))
        cavity = snapped_to_max_coupling(cavity);

    const auto slope = dispersive_slope(cavity);
    const auto freq_resp = frequency_response(cavity);
    if (slope.off_max_coupling)
        std::cerr << "warning: cavity sits more than lambda/100 away from max coupling\n";
    if (!membrane.underdamped())
        std::cerr << "warning: membrane damping is not small against the fundamental\n";

    std::optional<LaserFrequencyNoise> laser_noise;
    if (cfg.has_key("spectrum", "laser_noise_csv"))
        laser_noise = load_laser_noise(cfg.get_string("spectrum", "laser_noise_csv"));

    std::vector<std::pair<int, int>> modes;
    for (int m = 1; m <= order; ++m)
        for (int n = 1; n <= order; ++n) modes.push_back({m, n});

    const SpectrumModel model =
        signal_psd(modes, membrane, slope.chi(), freq_resp.chi_f(), det, laser_noise);
    for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";

    std::printf("chi = %.6e 1/m, chi_f = %.6e 1/Hz, fundamental = %.6e Hz\n", slope.chi(),
                freq_resp.chi_f(), mode_frequency(1, 1, membrane));

    CsvWriter csv(out_path);
    csv.comment("command: spectrum");
    {
        std::ostringstream os;
        os << "chi_per_m=" << slope.chi() << " chi_f_per_Hz=" << freq_resp.chi_f()
           << " mode_order_max=" << order;
        csv.comment(os.str());
    }
    const std::string columns[] = {"f_Hz",  "G_total_V2perHz", "G_thermal",
                                   "G_shot", "G_electronic",    "G_freqnoise"};
    csv.header(columns);
    for (int i = 0; i < points; ++i) {
        const double f = f_start + (f_stop - f_start) * i / (points - 1.0);
        csv.row({f, model.one_sided(f), model.one_sided(f, NoiseKind::thermal),
                 model.one_sided(f, NoiseKind::shot), model.one_sided(f, NoiseKind::electronic),
                 model.one_sided(f, NoiseKind::frequency)});
    }

    if (with_trace) {
        const std::string trace_path = out_path + ".trace.csv";
        const auto samples =
            synthesize_trace(model, det.sampling_rate, duration, seed, highpass);
        CsvWriter trace_csv(trace_path);
        trace_csv.comment("command: spectrum --trace");
        {
            std::ostringstream os;
            os << "fs_Hz=" << det.sampling_rate << " duration_s=" << duration
               << " seed=" << seed;
            trace_csv.comment(os.str());
        }
        const std::string trace_columns[] = {"t_s", "U_V"};
        trace_csv.header(trace_columns);
        for (std::size_t i = 0; i < samples.size(); ++i)
            trace_csv.row({i / det.sampling_rate, samples[i]});
        std::printf("trace written to %s\n", trace_path.c_str());
    }
    return 0;
}

int cmd_align(const std::string& config_path, const std::string& out_path) {
    const Config cfg = Config::parse_file(config_path);
    const AlignmentGeometry geometry = alignment_from_config(cfg);
    if (!cfg.has_section("align")) throw ConfigError("missing [align] section");
    const double dz_start = cfg.get_double("align", "dz_start_m");
    const double dz_stop = cfg.get_double("align", "dz_stop_m");
    const int points = static_cast<int>(cfg.get_int("align", "points"));
    if (points < 1) throw ConfigError("[align]: points must be at least 1");

    CsvWriter csv(out_path);
    csv.comment("command: align");
    {
        std::ostringstream os;
        os << "d_m=" << geometry.beam_separation << " f_i_m=" << geometry.focal_length
           << " lambda_m=" << geometry.wavelength << " w_m=" << geometry.waist;
        csv.comment(os.str());
    }
    const std::string columns[] = {"dz_m", "fringe_freq_per_m", "eta_r"};
    csv.header(columns);
    bool warned = false;
    for (int i = 0; i < points; ++i) {
        const double dz =
            points == 1 ? dz_start : dz_start + (dz_stop - dz_start) * i / (points - 1.0);
        const auto tilt = tilt_wavenumber(geometry, dz);
        if (tilt.outside_small_angle && !warned) {
            std::cerr << "warning: scan leaves the small-angle regime\n";
            warned = true;
        }
        csv.row({dz, tilt.approx / (2.0 * pi), overlap_tilted(tilt.approx, geometry.waist)});
    }

    for (double target : {0.95, 0.985})
        std::printf("overlap >= %.3f within dz = +-%.4e m\n", target,
                    lens_tolerance(target, geometry));
    return 0;
}

int cmd_calibrate(double slope, double responsivity, double wavelength) {
    const double g_el = gain_from_shot_noise(slope, responsivity);
    const double eta = quantum_efficiency(responsivity, wavelength);
    std::printf("g_el = %.6e V/Hz\n", g_el);
    std::printf("eta = %.4f\n", eta);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"membrane-in-the-middle cavity and polarimeter simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::uint64_t seed = 1;
    bool with_trace = false;
    double slope = 0.0, responsivity = 0.0, wavelength = 795e-9;

    auto* map = app.add_subcommand("map", "reflectance map over two scan axes");
    map->add_option("--config", config_path)->required();
    map->add_option("--out", out_path)->required();

    auto* scan = app.add_subcommand("scan", "lock scan across resonance");
    scan->add_option("--config", config_path)->required();
    scan->add_option("--out", out_path)->required();

    auto* spectrum = app.add_subcommand("spectrum", "voltage noise spectrum");
    spectrum->add_option("--config", config_path)->required();
    spectrum->add_option("--out", out_path)->required();
    spectrum->add_flag("--trace", with_trace, "also synthesize a time trace");
    spectrum->add_option("--seed", seed, "trace synthesis seed");

    auto* align = app.add_subcommand("align", "lens alignment tolerance table");
    align->add_option("--config", config_path)->required();
    align->add_option("--out", out_path)->required();

    auto* calibrate = app.add_subcommand("calibrate", "gain and quantum efficiency");
    calibrate->add_option("--slope", slope, "shot-noise slope, V^2/Hz/W")->required();
    calibrate->add_option("--responsivity", responsivity, "detector responsivity, A/W")
        ->required();
    calibrate->add_option("--wavelength", wavelength, "wavelength, m");

    CLI11_PARSE(app, argc, argv);

    try {
        if (map->parsed()) return cmd_map(config_path, out_path);
        if (scan->parsed()) return cmd_scan(config_path, out_path);
        if (spectrum->parsed()) return cmd_spectrum(config_path, out_path, with_trace, seed);
        if (align->parsed()) return cmd_align(config_path, out_path);
        if (calibrate->parsed()) return cmd_calibrate(slope, responsivity, wavelength);
    } catch (const mimpol::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
