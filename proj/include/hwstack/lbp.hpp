#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hwstack/descriptor.hpp"
#include "hwstack/raster.hpp"

namespace hwstack {

namespace detail {

inline int circular_transitions(unsigned code, int points) {
    int t = 0;
    for (int i = 0; i < points; ++i) {
        const unsigned a = (code >> i) & 1u;
        const unsigned b = (code >> ((i + 1) % points)) & 1u;
        t += static_cast<int>(a != b);
    }
    return t;
}

// Maps each P-bit code to a histogram bin: uniform patterns (at most two
// circular 0/1 transitions) get their own bins in ascending code order, all
// other patterns share the final bin. For P=8 this yields 58 + 1 = 59 bins.
inline std::vector<int> uniform_bin_table(int points) {
    const unsigned n_codes = 1u << points;
    std::vector<int> table(n_codes, -1);
    int next = 0;
    for (unsigned code = 0; code < n_codes; ++code)
        if (circular_transitions(code, points) <= 2) table[code] = next++;
    for (unsigned code = 0; code < n_codes; ++code)
        if (table[code] < 0) table[code] = next;
    return table;
}

inline int uniform_bin_count(int points) { return points * (points - 1) + 2 + 1; }

}  // namespace detail

// Local binary pattern descriptor: circular neighborhoods with bilinear
// neighbor sampling, the >= tie convention (neighbor >= center sets the
// bit), uniform-pattern binning, and per-cell L1-normalized histograms over
// an lbp_grid x lbp_grid partition of the valid (border-free) region.
inline Descriptor lbp(const Raster& img, const DescriptorConfig& cfg) {
    cfg.validate();
    const int P = cfg.lbp_points, grid = cfg.lbp_grid;
    const double R = cfg.lbp_radius;
    const int border = static_cast<int>(std::ceil(R));
    const int valid_w = img.width - 2 * border;
    const int valid_h = img.height - 2 * border;
    if (valid_w < grid || valid_h < grid)
        throw std::invalid_argument("window too small for LBP grid");

    static thread_local std::vector<int> table;
    static thread_local int table_points = -1;
    if (table_points != P) {
        table = detail::uniform_bin_table(P);
        table_points = P;
    }
    const int nbins = detail::uniform_bin_count(P);

    // neighbor offsets around the circle
    std::vector<double> ox(P), oy(P);
    for (int k = 0; k < P; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / P;
        ox[k] = R * std::cos(a);
        oy[k] = -R * std::sin(a);
    }

    std::vector<double> hist(static_cast<std::size_t>(grid) * grid * nbins, 0.0);
    for (int y = border; y < border + valid_h; ++y) {
        const int gy = (y - border) * grid / valid_h;
        for (int x = border; x < border + valid_w; ++x) {
            const int gx = (x - border) * grid / valid_w;
            const float center = img.at(x, y);
            unsigned code = 0;
            for (int k = 0; k < P; ++k) {
                const float v = img.sample(x + ox[k], y + oy[k], 0.0f);
                if (v >= center) code |= 1u << k;
            }
            hist[(static_cast<std::size_t>(gy) * grid + gx) * nbins + table[code]] += 1.0;
        }
    }

    Descriptor out;
    out.kind = DescriptorKind::LBP;
    out.values.resize(hist.size());
    for (int c = 0; c < grid * grid; ++c) {
        double s = 0.0;
        for (int b = 0; b < nbins; ++b) s += hist[static_cast<std::size_t>(c) * nbins + b];
        const double inv = s > 0.0 ? 1.0 / s : 0.0;
        for (int b = 0; b < nbins; ++b)
            out.values[static_cast<std::size_t>(c) * nbins + b] =
                static_cast<float>(hist[static_cast<std::size_t>(c) * nbins + b] * inv);
    }
    return out;
}

inline std::size_t lbp_dim(const DescriptorConfig& cfg) {
    return static_cast<std::size_t>(cfg.lbp_grid) * cfg.lbp_grid *
           detail::uniform_bin_count(cfg.lbp_points);
}

// Dispatch by kind; FUSED is the concatenation fusion of HOG and LBP.
inline Descriptor extract_descriptor(const Raster& img, DescriptorKind kind,
                                     const DescriptorConfig& cfg) {
    switch (kind) {
        case DescriptorKind::HOG: return hog(img, cfg);
        case DescriptorKind::LBP: return lbp(img, cfg);
        case DescriptorKind::FUSED: return fuse(hog(img, cfg), lbp(img, cfg));
    }
    throw std::invalid_argument("bad descriptor kind");
}

}  // namespace hwstack
