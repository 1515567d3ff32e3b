#pragma once
/*
 * Structured-text run configuration: named [sections] of key = value pairs,
 * one per line, # comments, unit-suffixed keys (L1_m, stress_Pa, ...).
 * Section and key order are preserved so parse -> serialize -> parse is the
 * identity on the parsed structure.
 */

#include "mimpol/beam.hpp"
#include "mimpol/cavity.hpp"
#include "mimpol/noise.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimpol {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Config {
public:
    static Config parse(const std::string& text);
    static Config parse_file(const std::string& path);
    std::string serialize() const;

    bool has_section(const std::string& section) const;
    bool has_key(const std::string& section, const std::string& key) const;

    // throw ConfigError when the key is missing or malformed
    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    bool operator==(const Config& other) const;

private:
    struct Entry {
        std::string key;
        std::string value;
        bool operator==(const Entry&) const = default;
    };
    struct Section {
        std::string name;
        std::vector<Entry> entries;
        bool operator==(const Section&) const = default;
    };
    std::vector<Section> sections_;

    const std::string* find(const std::string& section, const std::string& key) const;
};

// section loaders; each throws ConfigError on missing or inconsistent input
CavityConfig cavity_from_config(const Config& cfg);
MembraneConfig membrane_from_config(const Config& cfg);
DetectionConfig detection_from_config(const Config& cfg);
AlignmentGeometry alignment_from_config(const Config& cfg);
ScanAxis scan_axis_from_config(const Config& cfg, const std::string& section,
                               const std::string& prefix);

} // namespace mimpol
