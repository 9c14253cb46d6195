#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "hwstack/common.hpp"

namespace hwstack {

enum class DescriptorKind : std::uint32_t { HOG = 0, LBP = 1, FUSED = 2 };

inline const char* kind_name(DescriptorKind k) {
    switch (k) {
        case DescriptorKind::HOG: return "hog";
        case DescriptorKind::LBP: return "lbp";
        case DescriptorKind::FUSED: return "fused";
    }
    return "?";
}

inline DescriptorKind kind_from_name(const std::string& s) {
    if (s == "hog") return DescriptorKind::HOG;
    if (s == "lbp") return DescriptorKind::LBP;
    if (s == "fused") return DescriptorKind::FUSED;
    throw std::invalid_argument("unknown descriptor kind: " + s);
}

struct Descriptor {
    DescriptorKind kind = DescriptorKind::HOG;
    std::vector<float> values;

    std::size_t dim() const { return values.size(); }
};

struct DescriptorConfig {
    int hog_cell = 8;    // pixels per cell side
    int hog_bins = 9;    // unsigned orientation bins
    int hog_block = 2;   // cells per block side
    int lbp_radius = 1;  // pixels
    int lbp_points = 8;  // circular neighbors
    int lbp_grid = 4;    // cells per side

    void validate() const {
        if (hog_cell < 1 || hog_bins < 2 || hog_block < 1 || lbp_radius < 1 ||
            lbp_points < 1 || lbp_points > 24 || lbp_grid < 1)
            throw std::invalid_argument("bad descriptor config");
    }

    int hog_min_window() const { return hog_block * hog_cell; }
    int lbp_min_window() const { return lbp_grid + 2 * lbp_radius; }

    int min_window(DescriptorKind kind) const {
        switch (kind) {
            case DescriptorKind::HOG: return hog_min_window();
            case DescriptorKind::LBP: return lbp_min_window();
            case DescriptorKind::FUSED: return std::max(hog_min_window(), lbp_min_window());
        }
        return 1;
    }
};

inline double l2_norm(const std::vector<float>& v) {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

// In-place unit L2 normalization; an all-zero vector is left as zeros.
inline void normalize_l2(std::vector<float>& v) {
    const double n = l2_norm(v);
    if (n == 0.0) return;
    const float inv = static_cast<float>(1.0 / n);
    for (float& x : v) x *= inv;
}

inline double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline void normalize_l2(std::vector<double>& v) {
    const double n = l2_norm(v);
    if (n == 0.0) return;
    for (double& x : v) x /= n;
}

// Concatenation fusion. Each part is normalized to unit L2 first so that
// neither feature dominates the dot product; a zero-norm part stays zero.
inline Descriptor fuse(const Descriptor& a, const Descriptor& b) {
    Descriptor out;
    out.kind = DescriptorKind::FUSED;
    out.values.reserve(a.dim() + b.dim());
    out.values = a.values;
    normalize_l2(out.values);
    std::vector<float> bb = b.values;
    normalize_l2(bb);
    out.values.insert(out.values.end(), bb.begin(), bb.end());
    return out;
}

// 8-byte header (kind tag u32, dim u32) + little-endian float32 values.
inline void write_descriptor(std::ostream& os, const Descriptor& d) {
    put_u32(os, static_cast<std::uint32_t>(d.kind));
    put_u32(os, static_cast<std::uint32_t>(d.dim()));
    for (float v : d.values) put_f32(os, v);
}

inline Descriptor read_descriptor(std::istream& is) {
    Descriptor d;
    const std::uint32_t tag = get_u32(is);
    if (tag > 2) throw std::runtime_error("bad descriptor kind tag");
    d.kind = static_cast<DescriptorKind>(tag);
    const std::uint32_t n = get_u32(is);
    d.values.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) d.values[i] = get_f32(is);
    return d;
}

}  // namespace hwstack
