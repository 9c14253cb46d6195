#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hwstack/common.hpp"
#include "hwstack/config.hpp"
#include "hwstack/jitter.hpp"

namespace hwstack {

struct ManifestEntry {
    std::string path;
    std::string identity;
};

struct PairEntry {
    std::string path_a;
    std::string path_b;
    bool same = false;
};

struct JitterManifestEntry {
    std::string src_path;
    JitterParams params;
    std::string dst_path;
};

namespace detail {

inline std::vector<std::string> csv_fields(const std::string& line, std::size_t expected,
                                           std::size_t lineno, const char* what) {
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != expected)
        throw std::invalid_argument(std::string(what) + " line " + std::to_string(lineno) +
                                    ": expected " + std::to_string(expected) + " fields");
    std::vector<std::string> out;
    out.reserve(fields.size());
    for (const std::string& f : fields) out.push_back(trim(f));
    return out;
}

template <class Fn>
void for_csv_lines(std::istream& is, Fn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        fn(t, lineno);
    }
}

}  // namespace detail

// CSV `path,identity`, one image per line.
inline std::vector<ManifestEntry> parse_manifest(std::istream& is) {
    std::vector<ManifestEntry> out;
    detail::for_csv_lines(is, [&](const std::string& line, std::size_t lineno) {
        auto f = detail::csv_fields(line, 2, lineno, "manifest");
        if (f[0].empty() || f[1].empty())
            throw std::invalid_argument("manifest line " + std::to_string(lineno) +
                                        ": empty field");
        out.push_back({f[0], f[1]});
    });
    return out;
}

inline std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open manifest: " + path);
    auto out = parse_manifest(is);
    if (out.empty()) throw std::runtime_error("empty manifest: " + path);
    return out;
}

// CSV `pathA,pathB,label`, label 0 or 1.
inline std::vector<PairEntry> parse_pairs(std::istream& is) {
    std::vector<PairEntry> out;
    detail::for_csv_lines(is, [&](const std::string& line, std::size_t lineno) {
        auto f = detail::csv_fields(line, 3, lineno, "pair list");
        if (f[2] != "0" && f[2] != "1")
            throw std::invalid_argument("pair list line " + std::to_string(lineno) +
                                        ": label must be 0 or 1");
        out.push_back({f[0], f[1], f[2] == "1"});
    });
    return out;
}

inline std::vector<PairEntry> load_pairs(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open pair list: " + path);
    auto out = parse_pairs(is);
    if (out.empty()) throw std::runtime_error("empty pair list: " + path);
    return out;
}

// CSV `src_path,dx,dy,scale,rotation_deg,dst_path`.
inline std::vector<JitterManifestEntry> parse_jitter_manifest(std::istream& is) {
    std::vector<JitterManifestEntry> out;
    detail::for_csv_lines(is, [&](const std::string& line, std::size_t lineno) {
        auto f = detail::csv_fields(line, 6, lineno, "jitter manifest");
        JitterManifestEntry e;
        e.src_path = f[0];
        e.params.dx = parse_double(f[1]);
        e.params.dy = parse_double(f[2]);
        e.params.scale = parse_double(f[3]);
        e.params.rotation = parse_double(f[4]);
        e.dst_path = f[5];
        out.push_back(std::move(e));
    });
    return out;
}

inline void write_jitter_manifest(std::ostream& os,
                                  const std::vector<JitterManifestEntry>& entries) {
    os << "# src_path,dx,dy,scale,rotation_deg,dst_path\n";
    for (const auto& e : entries)
        os << e.src_path << ',' << fmt_double(e.params.dx) << ',' << fmt_double(e.params.dy) << ','
           << fmt_double(e.params.scale) << ',' << fmt_double(e.params.rotation) << ','
           << e.dst_path << '\n';
}

// Per-pair verification scores; deterministic text so reruns byte-compare.
inline void write_scores_csv(std::ostream& os,
                             const std::vector<PairEntry>& pairs,
                             const std::vector<double>& scores,
                             const std::vector<bool>& predictions) {
    os << "# pathA,pathB,label,score,predicted\n";
    for (std::size_t i = 0; i < pairs.size(); ++i)
        os << pairs[i].path_a << ',' << pairs[i].path_b << ',' << (pairs[i].same ? 1 : 0) << ','
           << fmt_double(scores[i]) << ',' << (predictions[i] ? 1 : 0) << '\n';
}

}  // namespace hwstack
