#pragma once

#include <cmath>
#include <stdexcept>

#include "hwstack/common.hpp"
#include "hwstack/raster.hpp"

namespace hwstack {

struct JitterParams {
    double dx = 0.0;        // pixels
    double dy = 0.0;        // pixels
    double scale = 1.0;     // ratio, > 0
    double rotation = 0.0;  // degrees, in-plane
};

struct JitterRanges {
    double dx_min = 0.0, dx_max = 0.0;
    double dy_min = 0.0, dy_max = 0.0;
    double scale_min = 1.0, scale_max = 1.0;
    double rot_min = 0.0, rot_max = 0.0;

    void validate() const {
        if (dx_min > dx_max || dy_min > dy_max || scale_min > scale_max || rot_min > rot_max)
            throw std::invalid_argument("inverted jitter bounds");
        if (scale_min <= 0.0) throw std::invalid_argument("jitter scale must be positive");
    }
};

inline JitterParams sample_jitter(SeededRng& rng, const JitterRanges& r) {
    r.validate();
    JitterParams p;
    p.dx = rng.uniform(r.dx_min, r.dx_max);
    p.dy = rng.uniform(r.dy_min, r.dy_max);
    p.scale = rng.uniform(r.scale_min, r.scale_max);
    p.rotation = rng.uniform(r.rot_min, r.rot_max);
    return p;
}

// Affine warp: rotate about the image center, scale about the center, then
// translate by (dx,dy). The output keeps the input dimensions; each output
// pixel is bilinearly sampled through the inverse map, out-of-bounds
// samples take `fill`.
inline Raster affine_jitter(const Raster& img, const JitterParams& p, float fill = 0.5f) {
    if (img.empty()) throw std::invalid_argument("empty raster");
    if (!std::isfinite(p.dx) || !std::isfinite(p.dy) || !std::isfinite(p.scale) ||
        !std::isfinite(p.rotation))
        throw std::invalid_argument("non-finite jitter params");
    if (p.scale <= 0.0) throw std::invalid_argument("jitter scale must be positive");

    const double cx = (img.width - 1) / 2.0;
    const double cy = (img.height - 1) / 2.0;
    const double theta = p.rotation * 3.14159265358979323846 / 180.0;
    const double c = std::cos(theta), s = std::sin(theta);

    Raster out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const double ry = (y - cy - p.dy) / p.scale;
        for (int x = 0; x < img.width; ++x) {
            const double rx = (x - cx - p.dx) / p.scale;
            // inverse rotation
            const double sx = cx + c * rx + s * ry;
            const double sy = cy - s * rx + c * ry;
            out.at(x, y) = img.sample(sx, sy, fill);
        }
    }
    return out;
}

// Cyclic (toroidal) shift of pixel content by (dx,dy); content that leaves
// one edge re-enters at the opposite edge.
inline Raster cyclic_shift(const Raster& img, int dx, int dy) {
    if (img.empty()) throw std::invalid_argument("empty raster");
    Raster out(img.width, img.height);
    const int w = img.width, h = img.height;
    auto mod = [](int a, int m) { return ((a % m) + m) % m; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = img.at(mod(x - dx, w), mod(y - dy, h));
    return out;
}

}  // namespace hwstack
