#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "omnoise/spectrum.hpp"

namespace omnoise {

namespace detail {
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

// CSV body: `freq_hz, psd_value` rows; metadata as `# key=value` header lines.
// Bodies are byte-reproducible for a given config and seed.
inline void write_spectrum_csv(const SpectrumResult& s, std::ostream& os) {
    for (const auto& [k, v] : s.metadata) os << "# " << k << "=" << v << "\n";
    os << "freq_hz,psd_value\n";
    for (std::size_t i = 0; i < s.omega.size(); ++i)
        os << detail::fmt_double(rad_to_hz(s.omega[i])) << ","
           << detail::fmt_double(s.values[i]) << "\n";
}

inline void write_spectrum_csv(const SpectrumResult& s,
                               const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path + " for writing");
    write_spectrum_csv(s, f);
}

inline SpectrumResult read_spectrum_csv(std::istream& is) {
    SpectrumResult s;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                key.erase(0, key.find_first_not_of(' '));
                key.erase(key.find_last_not_of(' ') + 1);
                s.metadata[key] = line.substr(eq + 1);
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;  // column header row
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error("malformed CSV row: " + line);
        s.omega.push_back(hz_to_rad(std::stod(line.substr(0, comma))));
        s.values.push_back(std::stod(line.substr(comma + 1)));
    }
    return s;
}

inline SpectrumResult read_spectrum_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    return read_spectrum_csv(f);
}

}  // namespace omnoise
