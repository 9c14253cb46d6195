#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hwstack/descriptor.hpp"
#include "hwstack/raster.hpp"

namespace hwstack {

// Histogram-of-oriented-gradients descriptor.
//
// Gradients: central differences [-1,0,1] with replicate borders.
// Orientations are unsigned (taken modulo pi); bin centers sit at
// i*(pi/nbins) and each pixel's magnitude is split linearly between the two
// nearest bins. Spatially, each pixel votes into the up-to-4 cells whose
// centers surround it, bilinearly weighted. Blocks of hog_block x hog_block
// cells slide with a 1-cell stride and are L2-hys normalized (L2, clip at
// 0.2, renormalize). The descriptor is the row-major concatenation of block
// vectors.
inline Descriptor hog(const Raster& img, const DescriptorConfig& cfg) {
    cfg.validate();
    const int cell = cfg.hog_cell, nbins = cfg.hog_bins, block = cfg.hog_block;
    if (img.width < block * cell || img.height < block * cell)
        throw std::invalid_argument("window smaller than one HOG block");

    const int cells_x = img.width / cell;
    const int cells_y = img.height / cell;
    std::vector<double> hist(static_cast<std::size_t>(cells_x) * cells_y * nbins, 0.0);

    const double pi = 3.14159265358979323846;
    const double bin_width = pi / nbins;
    auto px = [&](int x, int y) {
        x = x < 0 ? 0 : (x >= img.width ? img.width - 1 : x);
        y = y < 0 ? 0 : (y >= img.height ? img.height - 1 : y);
        return static_cast<double>(img.at(x, y));
    };

    // only pixels covered by whole cells contribute
    const int w = cells_x * cell, h = cells_y * cell;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = px(x + 1, y) - px(x - 1, y);
            const double gy = px(x, y + 1) - px(x, y - 1);
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;
            double theta = std::atan2(gy, gx);  // (-pi, pi]
            if (theta < 0) theta += pi;         // unsigned orientation [0, pi)
            if (theta >= pi) theta -= pi;

            const double fb = theta / bin_width;
            int b0 = static_cast<int>(std::floor(fb));
            double wb1 = fb - b0;
            if (b0 >= nbins) { b0 = nbins - 1; wb1 = 1.0; }
            const int b1 = (b0 + 1) % nbins;

            // bilinear cell weights; cell centers at (ci + 0.5) * cell - 0.5
            const double fcx = (x + 0.5) / cell - 0.5;
            const double fcy = (y + 0.5) / cell - 0.5;
            const int cx0 = static_cast<int>(std::floor(fcx));
            const int cy0 = static_cast<int>(std::floor(fcy));
            const double wx1 = fcx - cx0;
            const double wy1 = fcy - cy0;

            for (int dy = 0; dy <= 1; ++dy) {
                const int cy = cy0 + dy;
                if (cy < 0 || cy >= cells_y) continue;
                const double wy = dy ? wy1 : 1.0 - wy1;
                for (int dx = 0; dx <= 1; ++dx) {
                    const int cx = cx0 + dx;
                    if (cx < 0 || cx >= cells_x) continue;
                    const double wgt = mag * wy * (dx ? wx1 : 1.0 - wx1);
                    double* cellh = &hist[(static_cast<std::size_t>(cy) * cells_x + cx) * nbins];
                    cellh[b0] += wgt * (1.0 - wb1);
                    cellh[b1] += wgt * wb1;
                }
            }
        }
    }

    const int blocks_x = cells_x - block + 1;
    const int blocks_y = cells_y - block + 1;
    const int block_dim = block * block * nbins;

    Descriptor out;
    out.kind = DescriptorKind::HOG;
    out.values.resize(static_cast<std::size_t>(blocks_x) * blocks_y * block_dim);

    std::vector<double> bv(block_dim);
    std::size_t pos = 0;
    for (int by = 0; by < blocks_y; ++by) {
        for (int bx = 0; bx < blocks_x; ++bx) {
            int k = 0;
            for (int cy = by; cy < by + block; ++cy)
                for (int cx = bx; cx < bx + block; ++cx)
                    for (int b = 0; b < nbins; ++b)
                        bv[k++] = hist[(static_cast<std::size_t>(cy) * cells_x + cx) * nbins + b];

            // L2-hys
            double ss = 0.0;
            for (double v : bv) ss += v * v;
            double inv = ss > 0.0 ? 1.0 / std::sqrt(ss) : 0.0;
            ss = 0.0;
            for (double& v : bv) {
                v *= inv;
                if (v > 0.2) v = 0.2;
                ss += v * v;
            }
            inv = ss > 0.0 ? 1.0 / std::sqrt(ss) : 0.0;
            for (int i = 0; i < block_dim; ++i)
                out.values[pos++] = static_cast<float>(bv[i] * inv);
        }
    }
    return out;
}

inline std::size_t hog_dim(int win, const DescriptorConfig& cfg) {
    const int cells = win / cfg.hog_cell;
    const int blocks = cells - cfg.hog_block + 1;
    if (blocks <= 0) return 0;
    return static_cast<std::size_t>(blocks) * blocks * cfg.hog_block * cfg.hog_block * cfg.hog_bins;
}

}  // namespace hwstack
