#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "feigen/errors.hpp"
#include "feigen/extension.hpp"
#include "feigen/series.hpp"

namespace feigen {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// `key=value` lines. Blank lines and lines starting with '#' are skipped; whitespace
/// around keys and values is trimmed. Later duplicates win when applied in order.
inline KeyValues parse_key_values(const std::string& text) {
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    KeyValues out;
    std::istringstream is(text);
    int lineno = 0;
    for (std::string line; std::getline(is, line);) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw FormatError("config line " + std::to_string(lineno) + " is not key=value: " + line);
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

inline KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

/// Optional replacements for ExtensionConfig fields; unset fields keep the values
/// derived from the fixed point.
struct ExtensionOverrides {
    std::optional<int> depth_max;
    std::optional<double> basin_eps;
    std::optional<int> iter_max;
    std::optional<int> julia_iter_max;
    std::optional<double> escape_bound;
    std::optional<double> skel_tol;
    std::optional<double> skel_band_px;
    std::optional<std::int64_t> call_budget;
    std::optional<double> orbit_tol;

    void apply(ExtensionConfig& cfg) const {
        if (depth_max) cfg.depth_max = *depth_max;
        if (basin_eps) cfg.basin_eps = *basin_eps;
        if (iter_max) cfg.iter_max = *iter_max;
        if (julia_iter_max) cfg.julia_iter_max = *julia_iter_max;
        if (escape_bound) cfg.escape_bound = *escape_bound;
        if (skel_tol) cfg.skel_tol = *skel_tol;
        if (skel_band_px) cfg.skel_band_px = *skel_band_px;
        if (call_budget) cfg.call_budget = *call_budget;
        if (orbit_tol) cfg.orbit_tol = *orbit_tol;
    }
};

/// Every ExtensionConfig field as key=value text, in declaration order.
inline KeyValues extension_entries(const ExtensionConfig& cfg) {
    return {
        {"depth-max", std::to_string(cfg.depth_max)},
        {"rho", format_exact(cfg.rho)},
        {"basin-eps", format_exact(cfg.basin_eps)},
        {"iter-max", std::to_string(cfg.iter_max)},
        {"julia-iter-max", std::to_string(cfg.julia_iter_max)},
        {"escape-bound", format_exact(cfg.escape_bound)},
        {"skel-tol", format_exact(cfg.skel_tol)},
        {"skel-band-px", format_exact(cfg.skel_band_px)},
        {"call-budget", std::to_string(cfg.call_budget)},
        {"core-radius", format_exact(cfg.core_radius)},
        {"orbit-tol", format_exact(cfg.orbit_tol)},
    };
}

/// Resolved settings of one CLI run. Only the fields the command uses are reported.
struct RunConfig {
    std::string command;
    std::string fixed_point_path;
    double center_re = 0.0;
    double center_im = 0.0;
    double width = 2.0;
    int res = 512;
    std::string mode = "chessboard";
    int depth = 0;
    std::string output_path;
    int workers = 1;
    ExtensionOverrides overrides;
};

inline constexpr int kMinRes = 16;
inline constexpr int kMaxRes = 8192;

inline void validate(const RunConfig& rc) {
    if (rc.res < kMinRes || rc.res > kMaxRes) throw Error("res must lie in [16, 8192]");
    if (!(rc.width > 0.0)) throw Error("width must be positive");
    if (rc.workers < 1) throw Error("workers must be >= 1");
    if (rc.depth < 0) throw Error("depth must be >= 0");
}

/// One line of `key=value` pairs separated by single spaces. The worker count and
/// output path never appear, so the text (and anything embedding it) is the same for
/// every partitioning of the work and every destination.
inline std::string config_line(const KeyValues& entries) {
    std::string out;
    for (const auto& [k, v] : entries) {
        if (k == "workers" || k == "out" || k == "config") continue;
        if (!out.empty()) out += ' ';
        out += k + "=" + v;
    }
    return out;
}

/// Header block that starts every text report.
inline std::string report_header(const std::string& command, const std::string& fp_hash, const KeyValues& entries) {
    return "# feigen " + command + "\n# fp_fnv1a64=" + (fp_hash.empty() ? "none" : fp_hash) + "\n# config " +
           config_line(entries) + "\n";
}

/// Compact provenance token (no spaces) for raster dumps: fixed point hash and the hash
/// of the config line.
inline std::string provenance_token(const std::string& fp_hash, const KeyValues& entries) {
    return "fp:" + (fp_hash.empty() ? std::string("none") : fp_hash) + ",cfg:" + hex64(fnv1a64(config_line(entries)));
}

}  // namespace feigen
