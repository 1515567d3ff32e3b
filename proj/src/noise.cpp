#include "mimpol/noise.hpp"
#include "mimpol/constants.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mimpol {

double MembraneConfig::effective_mass() const {
    return density * side_a * side_b * thickness / 4.0;
}

bool MembraneConfig::underdamped() const {
    MembraneConfig square = *this;
    return damping < 0.1 * 2.0 * pi * mode_frequency(1, 1, square);
}

void MembraneConfig::validate() const {
    if (!(stress > 0.0) || !(density > 0.0) || !(side_a > 0.0) || !(side_b > 0.0) ||
        !(thickness > 0.0) || !(damping > 0.0) || !(temperature > 0.0))
        throw std::invalid_argument("MembraneConfig: all parameters must be positive");
}

double mode_frequency(int m, int n, const MembraneConfig& mc) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("mode_frequency: mode indices start at 1");
    mc.validate();
    const double mm = static_cast<double>(m);
    const double nn = static_cast<double>(n);
    return 0.5 * std::sqrt(mc.stress / mc.density) *
           std::sqrt(mm * mm / (mc.side_a * mc.side_a) + nn * nn / (mc.side_b * mc.side_b));
}

double thermal_psd(double f, double f0, double effective_mass, double damping,
                   double temperature) {
    const double scale = boltzmann_k * temperature /
                         (effective_mass * (2.0 * pi * f0) * (2.0 * pi * f0));
    const double detune = std::abs(f) - f0;
    return scale * 2.0 * damping / (16.0 * pi * pi * detune * detune + damping * damping);
}

double thermal_psd(double f, const MembraneConfig& mc) {
    return thermal_psd(f, mode_frequency(1, 1, mc), mc.effective_mass(), mc.damping,
                       mc.temperature);
}

double flux_from_power(double watts, double wavelength) {
    if (watts < 0.0 || !(wavelength > 0.0))
        throw std::invalid_argument("flux_from_power: bad power or wavelength");
    return watts * wavelength / (planck_h * speed_of_light);
}

double DetectionConfig::s0_from_power(double watts, double wavelength) {
    return 0.5 * flux_from_power(watts, wavelength);
}

void DetectionConfig::validate() const {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("DetectionConfig: eta outside (0, 1]");
    if (g_el < 0.0 || S0_in < 0.0 || detected_power < 0.0 || electronic_floor < 0.0)
        throw std::invalid_argument("DetectionConfig: negative parameter");
    if (!(wavelength > 0.0) || !(sampling_rate > 0.0) || !(responsivity > 0.0))
        throw std::invalid_argument("DetectionConfig: wavelength, sampling rate and responsivity must be positive");
    if (overlap_efficiency < 0.0 || overlap_efficiency > 1.0)
        throw std::invalid_argument("DetectionConfig: overlap efficiency outside [0, 1]");
}

double SpectrumModel::two_sided(double f) const {
    double sum = 0.0;
    for (const auto& c : components) sum += c.two_sided(f);
    return sum;
}

double SpectrumModel::two_sided(double f, NoiseKind kind) const {
    double sum = 0.0;
    for (const auto& c : components)
        if (c.kind == kind) sum += c.two_sided(f);
    return sum;
}

double LaserFrequencyNoise::operator()(double f) const {
    if (frequency.empty()) return 0.0;
    const double fa = std::abs(f);
    if (fa <= frequency.front()) return psd_one_sided.front();
    if (fa >= frequency.back()) return psd_one_sided.back();
    const auto it = std::upper_bound(frequency.begin(), frequency.end(), fa);
    const std::size_t hi = static_cast<std::size_t>(it - frequency.begin());
    const std::size_t lo = hi - 1;
    const double x = (std::log(fa) - std::log(frequency[lo])) /
                     (std::log(frequency[hi]) - std::log(frequency[lo]));
    return psd_one_sided[lo] + x * (psd_one_sided[hi] - psd_one_sided[lo]);
}

void LaserFrequencyNoise::validate() const {
    if (frequency.size() != psd_one_sided.size() || frequency.size() < 2)
        throw std::invalid_argument("LaserFrequencyNoise: need matching grids of at least two points");
    for (std::size_t i = 0; i < frequency.size(); ++i) {
        if (!(frequency[i] > 0.0) || psd_one_sided[i] < 0.0)
            throw std::invalid_argument("LaserFrequencyNoise: bad table entry");
        if (i > 0 && frequency[i] <= frequency[i - 1])
            throw std::invalid_argument("LaserFrequencyNoise: frequencies must increase");
    }
}

SpectrumModel signal_psd(const std::vector<std::pair<int, int>>& modes,
                         const MembraneConfig& mc, double chi, double chi_f,
                         const DetectionConfig& det,
                         const std::optional<LaserFrequencyNoise>& laser_noise) {
    mc.validate();
    det.validate();
    if (laser_noise) laser_noise->validate();

    SpectrumModel model;
    if (!mc.underdamped())
        model.warnings.push_back("membrane damping is not small against the fundamental frequency");

    const double sy_in = det.S0_in * std::sin(2.0 * det.alpha);
    const double readout = det.g_el * det.eta * sy_in * det.overlap_efficiency;

    // thermal membrane modes
    const double m_eff = mc.effective_mass();
    const double fwhm_hz = mc.damping / (2.0 * pi);
    std::vector<double> mode_freqs;
    for (const auto& [m, n] : modes) {
        const double f0 = mode_frequency(m, n, mc);
        for (double other : mode_freqs)
            if (std::abs(other - f0) < fwhm_hz)
                model.warnings.push_back("mode spacing below the damping linewidth");
        mode_freqs.push_back(f0);

        SpectrumComponent comp;
        comp.kind = NoiseKind::thermal;
        comp.label = "thermal_" + std::to_string(m) + std::to_string(n);
        const double amp2 = readout * readout * chi * chi;
        const double damping = mc.damping;
        const double temperature = mc.temperature;
        comp.two_sided = [=](double f) {
            return amp2 * thermal_psd(f, f0, m_eff, damping, temperature);
        };
        comp.white = false;
        comp.support_max = f0 + 1000.0 * mc.damping / (4.0 * pi);  // 1000 half-widths
        model.components.push_back(std::move(comp));
    }

    // photon shot noise, white; level set by the detected flux
    const double half_detected_flux =
        det.detected_power > 0.0
            ? 0.5 * flux_from_power(det.detected_power, det.wavelength)
            : std::cos(det.alpha) * std::cos(det.alpha) * det.S0_in;
    const double shot_two_sided = 0.25 * det.g_el * det.g_el * det.eta * half_detected_flux;
    model.components.push_back({NoiseKind::shot, "shot",
                                [shot_two_sided](double) { return shot_two_sided; }, true, 0.0});

    // electronic floor, echoed from the input (one-sided figure)
    const double el_two_sided = 0.5 * det.electronic_floor;
    model.components.push_back({NoiseKind::electronic, "electronic",
                                [el_two_sided](double) { return el_two_sided; }, true, 0.0});

    // laser frequency noise through the frequency response
    if (laser_noise) {
        SpectrumComponent comp;
        comp.kind = NoiseKind::frequency;
        comp.label = "frequency";
        const double amp2 = readout * readout * chi_f * chi_f;
        const LaserFrequencyNoise table = *laser_noise;
        comp.two_sided = [=](double f) { return amp2 * 0.5 * table(f); };
        comp.white = false;
        comp.support_max = table.frequency.back();
        model.components.push_back(std::move(comp));
    }
    return model;
}

double gain_from_shot_noise(double slope, double responsivity) {
    if (!(slope > 0.0) || !(responsivity > 0.0))
        throw std::invalid_argument("gain_from_shot_noise: slope and responsivity must be positive");
    return std::sqrt(4.0 * elementary_charge * slope / responsivity);
}

double quantum_efficiency(double responsivity, double wavelength) {
    if (!(responsivity > 0.0) || !(wavelength > 0.0))
        throw std::invalid_argument("quantum_efficiency: responsivity and wavelength must be positive");
    return responsivity * planck_h * speed_of_light / (elementary_charge * wavelength);
}

double folded_one_sided(const SpectrumModel& model, double f, double fs) {
    double total = 0.0;
    for (const auto& comp : model.components) {
        if (comp.white) {
            total += 2.0 * comp.two_sided(f);
            continue;
        }
        const int orders = static_cast<int>(std::ceil(std::max(0.0, comp.support_max) / fs)) + 1;
        double sum = 2.0 * comp.two_sided(f);
        for (int m = 1; m <= orders; ++m) {
            sum += 2.0 * comp.two_sided(m * fs + f);
            sum += 2.0 * comp.two_sided(m * fs - f);
        }
        total += sum;
    }
    return total;
}

std::vector<double> synthesize_trace(const SpectrumModel& model, double fs, double duration,
                                     std::uint64_t seed, double highpass_hz) {
    if (!(fs > 0.0))
        throw std::invalid_argument("synthesize_trace: sampling rate must be positive");
    const long long n_ll = std::llround(duration * fs);
    if (n_ll < 2)
        throw std::invalid_argument("synthesize_trace: need at least two samples");
    const std::size_t n = static_cast<std::size_t>(n_ll);
    const std::size_t half = n / 2;
    const double df = fs / static_cast<double>(n);

    std::vector<double> target(half + 1);
    for (std::size_t k = 0; k <= half; ++k)
        target[k] = folded_one_sided(model, k * df, fs);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::complex<double>> spectrum(n, {0.0, 0.0});
    for (std::size_t k = 1; 2 * k < n; ++k) {
        const double sigma = std::sqrt(target[k] * fs * n / 4.0);
        spectrum[k] = {sigma * gauss(rng), sigma * gauss(rng)};
        spectrum[n - k] = std::conj(spectrum[k]);
    }
    if (n % 2 == 0)
        spectrum[half] = {std::sqrt(target[half] * fs * n / 2.0) * gauss(rng), 0.0};

    std::vector<std::complex<double>> time(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n),
                                      reinterpret_cast<fftw_complex*>(spectrum.data()),
                                      reinterpret_cast<fftw_complex*>(time.data()),
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    std::vector<double> samples(n);
    for (std::size_t i = 0; i < n; ++i) samples[i] = time[i].real() / static_cast<double>(n);

    if (highpass_hz > 0.0) {
        const double a = 1.0 / (1.0 + 2.0 * pi * highpass_hz / fs);
        double prev_in = samples[0];
        double prev_out = 0.0;
        samples[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double out = a * (prev_out + samples[i] - prev_in);
            prev_in = samples[i];
            prev_out = out;
            samples[i] = out;
        }
    }
    return samples;
}

PsdEstimate estimate_psd(std::span<const double> samples, double fs,
                         std::size_t segment_length, std::size_t averages) {
    if (!(fs > 0.0) || segment_length < 2)
        throw std::invalid_argument("estimate_psd: bad sampling rate or segment length");
    const std::size_t available = samples.size() / segment_length;
    if (averages == 0) averages = available;
    if (averages == 0 || available < averages)
        throw std::invalid_argument("estimate_psd: insufficient data");

    const std::size_t half = segment_length / 2;
    PsdEstimate est;
    est.df = fs / static_cast<double>(segment_length);
    est.frequency.resize(half + 1);
    est.psd.assign(half + 1, 0.0);
    for (std::size_t k = 0; k <= half; ++k) est.frequency[k] = k * est.df;

    std::vector<std::complex<double>> in(segment_length), out(segment_length);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(segment_length),
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    for (std::size_t s = 0; s < averages; ++s) {
        const double* seg = samples.data() + s * segment_length;
        for (std::size_t i = 0; i < segment_length; ++i) in[i] = {seg[i], 0.0};
        fftw_execute(plan);
        for (std::size_t k = 0; k <= half; ++k) est.psd[k] += std::norm(out[k]);
    }
    fftw_destroy_plan(plan);

    const double norm = 1.0 / (static_cast<double>(averages) * fs *
                               static_cast<double>(segment_length));
    for (std::size_t k = 0; k <= half; ++k) {
        const bool edge = (k == 0) || (segment_length % 2 == 0 && k == half);
        est.psd[k] *= norm * (edge ? 1.0 : 2.0);
    }
    return est;
}

} // namespace mimpol
