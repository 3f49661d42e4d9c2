#pragma once

// CSV import/export for profiles, index spectra, cavity spectra, mode lists,
// pulse traces and design candidates.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "afcmem/cavity.hpp"
#include "afcmem/designer.hpp"
#include "afcmem/dispersion.hpp"
#include "afcmem/error.hpp"
#include "afcmem/spectra.hpp"
#include "afcmem/storage.hpp"

namespace afcmem::io {

namespace detail {

inline void put(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

template <typename... Ts>
void row(std::string& out, Ts... values) {
    bool first = true;
    ((out += first ? "" : ",", first = false, put(out, values)), ...);
    out += '\n';
}

}  // namespace detail

inline std::string profile_csv(const AbsorptionProfile& p) {
    std::string out = "frequency_hz,alpha_per_m\n";
    for (std::size_t i = 0; i < p.grid.size(); ++i) detail::row(out, p.grid.at(i), p.alpha[i]);
    return out;
}

inline std::string index_csv(const AbsorptionProfile& p, const IndexProfile& idx) {
    require_same_grid(p.grid, idx.grid, "index_csv");
    std::string out = "frequency_hz,alpha_per_m,n_r,n_g\n";
    for (std::size_t i = 0; i < p.grid.size(); ++i) detail::row(out, p.grid.at(i), p.alpha[i], idx.n_r[i], idx.n_g[i]);
    return out;
}

inline std::string cavity_csv(const CavitySpectra& s) {
    std::string out = "frequency_hz,reflectance,transmittance,absorbed\n";
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        detail::row(out, s.grid.at(i), s.reflectance(i), s.transmittance(i), s.absorbed(i));
    return out;
}

inline std::string modes_csv(const CavityModeList& m) {
    std::string out = "mode_hz,fwhm_hz,peak_t\n";
    for (std::size_t i = 0; i < m.size(); ++i)
        detail::row(out, m.mode_frequencies[i], m.mode_fwhm[i], m.mode_peak_transmission[i]);
    return out;
}

inline std::string trace_csv(const PulseTrace& t) {
    std::string out = "time_s,intensity,real,imag\n";
    for (std::size_t i = 0; i < t.samples.size(); ++i)
        detail::row(out, t.time(i), t.intensity(i), t.samples[i].real(), t.samples[i].imag());
    return out;
}

inline std::string candidates_csv(const std::vector<DesignCandidate>& c) {
    std::string out = "f_afc,d,r1,eta,delta_cav_hz\n";
    for (const auto& k : c) detail::row(out, k.f_afc, k.d, k.r1, k.eta, k.delta_cav);
    return out;
}

/// Numeric table with a header line.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::string trim(std::string s) {
    const auto ws = " \t\r";
    s.erase(0, s.find_first_not_of(ws));
    const auto end = s.find_last_not_of(ws);
    s.erase(end == std::string::npos ? 0 : end + 1);
    return s;
}

/// Parses CSV text; errors name the offending line.
inline Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        auto cells = split(line);
        if (t.header.empty()) {
            for (auto& c : cells) t.header.push_back(trim(c));
            continue;
        }
        if (cells.size() != t.header.size())
            throw ConfigError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                              " columns, found " + std::to_string(cells.size()));
        std::vector<double> values;
        for (auto& c : cells) {
            const std::string cell = trim(c);
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != cell.size() || !std::isfinite(v))
                throw ConfigError("line " + std::to_string(lineno) + ": cannot parse number '" + cell + "'");
            values.push_back(v);
        }
        t.rows.push_back(std::move(values));
    }
    if (t.header.empty()) throw ConfigError("csv input is empty");
    return t;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + path);
    return ss.str();
}

/// Absorption spectrum from `frequency_hz,alpha_per_m` text, resampled by
/// linear interpolation onto a uniform grid of `count` points (a power of two)
/// spanning the measured frequency range. A decreasing frequency column is
/// accepted and reversed.
inline AbsorptionProfile read_profile_csv(const std::string& text, double length, std::size_t count = 0) {
    const Table t = parse_csv(text);
    if (t.header.size() != 2 || t.header[0] != "frequency_hz" || t.header[1] != "alpha_per_m")
        throw ConfigError("csv header must be 'frequency_hz,alpha_per_m'");
    if (t.rows.size() < 2) throw ConfigError("csv needs at least two data rows");
    std::vector<double> f, a;
    for (const auto& r : t.rows) {
        f.push_back(r[0]);
        a.push_back(r[1]);
    }
    if (f.front() > f.back()) {
        std::reverse(f.begin(), f.end());
        std::reverse(a.begin(), a.end());
    }
    for (std::size_t i = 1; i < f.size(); ++i)
        if (!(f[i] > f[i - 1])) throw ConfigError("frequency column is not strictly monotone");
    for (double v : a)
        if (v < 0.0) throw PhysicsError("read_profile_csv", "alpha must be non-negative");

    const std::size_t n = count ? count : std::max<std::size_t>(next_power_of_two(f.size()), 2);
    if (!is_power_of_two(n) || n < 2) throw ConfigError("resampling count must be a power of two >= 2");
    const double spacing = (f.back() - f.front()) / static_cast<double>(n - 1);
    const double center = f.front() + static_cast<double>(n / 2) * spacing;
    const FrequencyGrid grid(center, spacing, n);
    std::vector<double> alpha(n);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::min(grid.at(i), f.back());
        while (j + 2 < f.size() && f[j + 1] < x) ++j;
        const double w = std::clamp((x - f[j]) / (f[j + 1] - f[j]), 0.0, 1.0);
        alpha[i] = (1.0 - w) * a[j] + w * a[j + 1];
    }
    return AbsorptionProfile(grid, std::move(alpha), length);
}

}  // namespace afcmem::io
