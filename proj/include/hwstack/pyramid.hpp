#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hwstack/raster.hpp"

namespace hwstack {

struct PyramidLevel {
    double ratio = 1.0;
    Raster image;
};

struct Pyramid {
    std::vector<PyramidLevel> levels;
};

// Bilinear resize to explicit dimensions. A ratio of exactly 1 is an
// identity copy so level 1.0 of a pyramid is pixel-identical to the source.
inline Raster resize_bilinear(const Raster& img, int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0) throw std::invalid_argument("resize to zero area");
    if (out_w == img.width && out_h == img.height) return img;
    Raster out(out_w, out_h);
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        // map output pixel centers into source pixel-center coordinates
        double src_y = (y + 0.5) * sy - 0.5;
        if (src_y < 0) src_y = 0;
        if (src_y > img.height - 1) src_y = img.height - 1;
        for (int x = 0; x < out_w; ++x) {
            double src_x = (x + 0.5) * sx - 0.5;
            if (src_x < 0) src_x = 0;
            if (src_x > img.width - 1) src_x = img.width - 1;
            out.at(x, y) = img.sample(src_x, src_y, 0.0f);
        }
    }
    return out;
}

// Level i is the source resized by ratios[i]; dimensions round half-up.
// Ratios must be strictly monotone. `min_dim` guards against levels too
// small for the descriptor window.
inline Pyramid build_pyramid(const Raster& img, const std::vector<double>& ratios, int min_dim = 1) {
    if (ratios.empty()) throw std::invalid_argument("no pyramid ratios");
    bool inc = true, dec = true;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i] <= 0.0) throw std::invalid_argument("pyramid ratio must be positive");
        if (i > 0) {
            inc = inc && ratios[i] > ratios[i - 1];
            dec = dec && ratios[i] < ratios[i - 1];
        }
    }
    if (ratios.size() > 1 && !inc && !dec)
        throw std::invalid_argument("pyramid ratios must be strictly monotone");

    Pyramid pyr;
    pyr.levels.reserve(ratios.size());
    for (double r : ratios) {
        const int w = static_cast<int>(std::floor(img.width * r + 0.5));
        const int h = static_cast<int>(std::floor(img.height * r + 0.5));
        if (w < min_dim || h < min_dim)
            throw std::invalid_argument("pyramid level smaller than minimum window");
        pyr.levels.push_back({r, resize_bilinear(img, w, h)});
    }
    return pyr;
}

// n geometrically spaced ratios from `first` to `last` inclusive.
inline std::vector<double> geometric_ratios(double first, double last, int n) {
    if (n < 1) throw std::invalid_argument("need at least one ratio");
    std::vector<double> out;
    out.reserve(n);
    if (n == 1) {
        out.push_back(first);
        return out;
    }
    const double step = std::pow(last / first, 1.0 / (n - 1));
    double r = first;
    for (int i = 0; i < n; ++i) {
        out.push_back(r);
        r *= step;
    }
    out.back() = last;
    return out;
}

}  // namespace hwstack
