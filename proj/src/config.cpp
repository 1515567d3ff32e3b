#include "mimpol/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mimpol {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            cfg.set(current, "", "");  // ensure ordering even for empty sections
            cfg.sections_.back().entries.clear();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        if (current.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.set(current, key, value);
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const auto& sec : sections_) {
        out << '[' << sec.name << "]\n";
        for (const auto& e : sec.entries) out << e.key << " = " << e.value << '\n';
        out << '\n';
    }
    return out.str();
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    Section* sec = nullptr;
    for (auto& s : sections_)
        if (s.name == section) sec = &s;
    if (!sec) {
        sections_.push_back({section, {}});
        sec = &sections_.back();
    }
    if (key.empty()) return;
    for (auto& e : sec->entries) {
        if (e.key == key) {
            e.value = value;
            return;
        }
    }
    sec->entries.push_back({key, value});
}

const std::string* Config::find(const std::string& section, const std::string& key) const {
    for (const auto& s : sections_) {
        if (s.name != section) continue;
        for (const auto& e : s.entries)
            if (e.key == key) return &e.value;
    }
    return nullptr;
}

bool Config::has_section(const std::string& section) const {
    for (const auto& s : sections_)
        if (s.name == section) return true;
    return false;
}

bool Config::has_key(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    const std::string* v = find(section, key);
    if (!v) throw ConfigError("missing config key [" + section + "] " + key);
    return *v;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0')
        throw ConfigError("config key [" + section + "] " + key + " is not a number: " + raw);
    return v;
}

long Config::get_int(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    char* end = nullptr;
    const long v = std::strtol(raw.c_str(), &end, 10);
    if (end == raw.c_str() || *end != '\0')
        throw ConfigError("config key [" + section + "] " + key + " is not an integer: " + raw);
    return v;
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    throw ConfigError("config key [" + section + "] " + key + " is not a boolean: " + raw);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    const std::string* v = find(section, key);
    return v ? *v : fallback;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    return has_key(section, key) ? get_double(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    return has_key(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    return has_key(section, key) ? get_bool(section, key) : fallback;
}

bool Config::operator==(const Config& other) const {
    return sections_ == other.sections_;
}

CavityConfig cavity_from_config(const Config& cfg) {
    const std::string s = "cavity";
    if (!cfg.has_section(s)) throw ConfigError("missing [cavity] section");
    CavityConfig out;
    out.wavelength = cfg.get_double(s, "lambda_m", out.wavelength);
    out.R1 = cfg.get_double(s, "R1", out.R1);
    out.R3 = cfg.get_double(s, "R3", out.R3);
    if (cfg.has_key(s, "R2")) {
        if (cfg.has_key(s, "membrane_n") || cfg.has_key(s, "membrane_d_m"))
            throw ConfigError("[cavity]: give either R2 or membrane_n/membrane_d_m, not both");
        out.R2 = cfg.get_double(s, "R2");
        out.membrane_loss = cfg.get_double(s, "membrane_loss", 0.0);
    } else if (cfg.has_key(s, "membrane_n")) {
        const double n = cfg.get_double(s, "membrane_n");
        const double d = cfg.get_double(s, "membrane_d_m");
        const double loss = cfg.get_double(s, "membrane_loss", membrane_absorption_default);
        const auto mc = membrane_coefficients(n, d, out.wavelength, loss);
        out.R2 = mc.R2;
        out.membrane_loss = loss;
    } else {
        out.R2 = 0.0;  // empty resonator
        out.membrane_loss = 0.0;
    }
    out.L1 = cfg.get_double(s, "L1_m", out.L1);
    out.L2 = cfg.get_double(s, "L2_m", out.L2);
    out.dz_m = cfg.get_double(s, "dz_m_m", 0.0);
    out.dz_c = cfg.get_double(s, "dz_c_m", 0.0);
    out.gamma1 = cfg.get_double(s, "gamma1", 1.0);
    out.gamma2 = cfg.get_double(s, "gamma2", 1.0);
    out.laser_detuning = cfg.get_double(s, "laser_detuning_Hz", 0.0);
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[cavity]: ") + e.what());
    }
    return out;
}

MembraneConfig membrane_from_config(const Config& cfg) {
    const std::string s = "membrane";
    if (!cfg.has_section(s)) throw ConfigError("missing [membrane] section");
    MembraneConfig out;
    out.stress = cfg.get_double(s, "stress_Pa", out.stress);
    out.density = cfg.get_double(s, "density_kg_m3", out.density);
    out.side_a = cfg.get_double(s, "side_a_m", out.side_a);
    out.side_b = cfg.get_double(s, "side_b_m", out.side_b);
    out.thickness = cfg.get_double(s, "thickness_m", out.thickness);
    out.damping = cfg.get_double(s, "damping_rad_s", out.damping);
    out.temperature = cfg.get_double(s, "temperature_K", out.temperature);
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[membrane]: ") + e.what());
    }
    return out;
}

DetectionConfig detection_from_config(const Config& cfg) {
    const std::string s = "detection";
    if (!cfg.has_section(s)) throw ConfigError("missing [detection] section");
    DetectionConfig out;
    out.wavelength = cfg.get_double(s, "lambda_m", out.wavelength);
    out.g_el = cfg.get_double(s, "g_el_V_per_Hz", out.g_el);
    out.eta = cfg.get_double(s, "eta", out.eta);
    out.alpha = cfg.get_double(s, "alpha_rad", out.alpha);
    if (cfg.has_key(s, "input_power_W"))
        out.S0_in = DetectionConfig::s0_from_power(cfg.get_double(s, "input_power_W"),
                                                   out.wavelength);
    else
        out.S0_in = cfg.get_double(s, "S0_in_per_s", 0.0);
    out.detected_power = cfg.get_double(s, "detected_power_W", 0.0);
    out.responsivity = cfg.get_double(s, "responsivity_A_per_W", out.responsivity);
    out.electronic_floor = cfg.get_double(s, "electronic_floor_V2_per_Hz", 0.0);
    out.sampling_rate = cfg.get_double(s, "sampling_rate_Hz", out.sampling_rate);
    out.overlap_efficiency = cfg.get_double(s, "overlap_efficiency", 1.0);
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[detection]: ") + e.what());
    }
    return out;
}

AlignmentGeometry alignment_from_config(const Config& cfg) {
    const std::string s = "alignment";
    if (!cfg.has_section(s)) throw ConfigError("missing [alignment] section");
    AlignmentGeometry out;
    out.beam_separation = cfg.get_double(s, "d_m", out.beam_separation);
    out.focal_length = cfg.get_double(s, "f_i_m", out.focal_length);
    out.wavelength = cfg.get_double(s, "lambda_m", out.wavelength);
    out.waist = cfg.get_double(s, "w_m", out.waist);
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[alignment]: ") + e.what());
    }
    return out;
}

ScanAxis scan_axis_from_config(const Config& cfg, const std::string& section,
                               const std::string& prefix) {
    ScanAxis axis;
    const std::string name = cfg.get_string(section, prefix);
    if (name == "dz_m")
        axis.variable = ScanVariable::membrane_position;
    else if (name == "dz_c")
        axis.variable = ScanVariable::mirror_position;
    else if (name == "laser_detuning")
        axis.variable = ScanVariable::laser_detuning;
    else
        throw ConfigError("[" + section + "] " + prefix + ": unknown axis variable '" + name +
                          "' (expected dz_m, dz_c or laser_detuning)");
    axis.start = cfg.get_double(section, prefix + "_start");
    axis.stop = cfg.get_double(section, prefix + "_stop");
    axis.points = static_cast<int>(cfg.get_int(section, prefix + "_points"));
    if (axis.points < 1)
        throw ConfigError("[" + section + "] " + prefix + "_points must be at least 1");
    return axis;
}

} // namespace mimpol
