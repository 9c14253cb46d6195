#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwstack/engine.hpp"

namespace hwstack {

// Full run configuration: the engine settings plus the file paths a command
// needs. Serialized as `key = value` lines; every field has a default and
// the text form round-trips losslessly.
struct RunConfig {
    EngineConfig engine{};
    std::string template_manifest;  // CSV path,identity for layer-2 training
    std::string layer3_manifest;    // CSV path,identity for layer-3 training
    std::string bundle_dir;
    std::string pairs_csv;  // CSV pathA,pathB,label
    std::string output_dir = ".";
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt_double(v[i]);
    }
    return out;
}

inline std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const std::string& part : split(s, ','))
        out.push_back(parse_double(trim(part)));
    return out;
}

inline std::uint64_t parse_u64(const std::string& s) {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
    return v;
}

inline int parse_int(const std::string& s) {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
    return v;
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::invalid_argument("bad boolean: " + s);
}

}  // namespace detail

// Applies one key = value assignment; unknown keys are an error. The same
// routine backs both config files and command-line overrides.
inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    using namespace detail;
    EngineConfig& e = cfg.engine;
    if (key == "descriptor") {
        e.kind = kind_from_name(value);
    } else if (key == "hog_cell") {
        e.desc.hog_cell = parse_int(value);
    } else if (key == "hog_bins") {
        e.desc.hog_bins = parse_int(value);
    } else if (key == "hog_block") {
        e.desc.hog_block = parse_int(value);
    } else if (key == "lbp_radius") {
        e.desc.lbp_radius = parse_int(value);
    } else if (key == "lbp_points") {
        e.desc.lbp_points = parse_int(value);
    } else if (key == "lbp_grid") {
        e.desc.lbp_grid = parse_int(value);
    } else if (key == "window") {
        e.window = static_cast<std::uint32_t>(parse_int(value));
    } else if (key == "stride") {
        e.stride = static_cast<std::uint32_t>(parse_int(value));
    } else if (key == "pyramid_ratios") {
        e.ratios = parse_doubles(value);
    } else if (key == "rotations") {
        e.rotations = parse_doubles(value);
    } else if (key == "window_pool") {
        e.window_pool = pool_from_name(value);
    } else if (key == "rotation_pool") {
        e.rotation_pool = pool_from_name(value);
    } else if (key == "identity_pool") {
        e.identity_pool = pool_from_name(value);
    } else if (key == "consensus") {
        if (value == "exhaustive") {
            e.use_coc = false;
        } else {
            e.use_coc = true;
            e.consensus = static_cast<std::uint32_t>(parse_int(value));
        }
    } else if (key == "hash_bits") {
        e.hash_bits = static_cast<std::uint32_t>(parse_int(value));
    } else if (key == "hash_tables") {
        e.hash_tables = static_cast<std::uint32_t>(parse_int(value));
    } else if (key == "pca_k") {
        e.pca_k = value == "exact" ? 0 : static_cast<std::uint32_t>(parse_int(value));
    } else if (key == "hash_projected") {
        e.hash_projected = parse_bool(value);
    } else if (key == "fill") {
        e.fill = static_cast<float>(parse_double(value));
    } else if (key == "seed") {
        e.seed = parse_u64(value);
    } else if (key == "threads") {
        e.threads = static_cast<std::uint32_t>(parse_int(value));
    } else if (key == "template_manifest") {
        cfg.template_manifest = value;
    } else if (key == "layer3_manifest") {
        cfg.layer3_manifest = value;
    } else if (key == "bundle_dir") {
        cfg.bundle_dir = value;
    } else if (key == "pairs_csv") {
        cfg.pairs_csv = value;
    } else if (key == "output_dir") {
        cfg.output_dir = value;
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

inline RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        apply_config_entry(cfg, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    return parse_config(is);
}

// Canonical text form: fixed key order, every field explicit.
inline std::string serialize_config(const RunConfig& cfg) {
    using namespace detail;
    const EngineConfig& e = cfg.engine;
    std::ostringstream os;
    os << "descriptor = " << kind_name(e.kind) << '\n'
       << "hog_cell = " << e.desc.hog_cell << '\n'
       << "hog_bins = " << e.desc.hog_bins << '\n'
       << "hog_block = " << e.desc.hog_block << '\n'
       << "lbp_radius = " << e.desc.lbp_radius << '\n'
       << "lbp_points = " << e.desc.lbp_points << '\n'
       << "lbp_grid = " << e.desc.lbp_grid << '\n'
       << "window = " << e.window << '\n'
       << "stride = " << e.stride << '\n'
       << "pyramid_ratios = " << join_doubles(e.ratios) << '\n'
       << "rotations = " << join_doubles(e.rotations) << '\n'
       << "window_pool = " << pool_name(e.window_pool) << '\n'
       << "rotation_pool = " << pool_name(e.rotation_pool) << '\n'
       << "identity_pool = " << pool_name(e.identity_pool) << '\n'
       << "consensus = " << (e.use_coc ? std::to_string(e.consensus) : "exhaustive") << '\n'
       << "hash_bits = " << e.hash_bits << '\n'
       << "hash_tables = " << e.hash_tables << '\n'
       << "pca_k = " << (e.pca_k ? std::to_string(e.pca_k) : "exact") << '\n'
       << "hash_projected = " << (e.hash_projected ? "true" : "false") << '\n'
       << "fill = " << fmt_double(e.fill) << '\n'
       << "seed = " << e.seed << '\n'
       << "threads = " << e.threads << '\n'
       << "template_manifest = " << cfg.template_manifest << '\n'
       << "layer3_manifest = " << cfg.layer3_manifest << '\n'
       << "bundle_dir = " << cfg.bundle_dir << '\n'
       << "pairs_csv = " << cfg.pairs_csv << '\n'
       << "output_dir = " << cfg.output_dir << '\n';
    return os.str();
}

inline void save_config(const std::string& path, const RunConfig& cfg) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write config: " + path);
    os << serialize_config(cfg);
}

}  // namespace hwstack
