#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hwstack/common.hpp"
#include "hwstack/jitter.hpp"
#include "hwstack/raster.hpp"

namespace hwstack {

// Procedural stand-ins for the face images: each identity is a glyph built
// from a class-common pattern (structure shared by every identity, the way
// all faces share a layout) blended with an identity-specific pattern.
// Backgrounds are pure textures with the same intensity statistics, so
// clutter is not separable by brightness or contrast alone.

// One octave of value noise: a random knot lattice with `cell`-pixel
// spacing, bilinearly interpolated, zero-centered, added with `weight`.
inline void add_noise_octave(Raster& img, SeededRng& rng, int cell, double weight) {
    if (cell < 1) throw std::invalid_argument("octave cell must be positive");
    const int kx = img.width / cell + 2;
    const int ky = img.height / cell + 2;
    std::vector<double> knots(static_cast<std::size_t>(kx) * ky);
    for (double& k : knots) k = 2.0 * rng.uniform01() - 1.0;
    const auto knot = [&](int i, int j) { return knots[static_cast<std::size_t>(j) * kx + i]; };
    for (int y = 0; y < img.height; ++y) {
        const double gy = static_cast<double>(y) / cell;
        const int j = static_cast<int>(gy);
        const double fy = gy - j;
        for (int x = 0; x < img.width; ++x) {
            const double gx = static_cast<double>(x) / cell;
            const int i = static_cast<int>(gx);
            const double fx = gx - i;
            const double v = (1 - fy) * ((1 - fx) * knot(i, j) + fx * knot(i + 1, j)) +
                             fy * ((1 - fx) * knot(i, j + 1) + fx * knot(i + 1, j + 1));
            img.at(x, y) += static_cast<float>(weight * v);
        }
    }
}

inline Raster value_noise(int size, SeededRng& rng, const std::vector<int>& cells,
                          const std::vector<double>& weights) {
    if (cells.size() != weights.size() || cells.empty())
        throw std::invalid_argument("octave cells/weights mismatch");
    Raster img(size, size, 0.0f);
    for (std::size_t o = 0; o < cells.size(); ++o) add_noise_octave(img, rng, cells[o], weights[o]);
    return img;
}

// Affine-map intensities to the target mean and spread, then clip to [0,1].
// A flat image becomes a constant at the target mean.
inline void standardize(Raster& img, float mean, float sd) {
    double m = 0.0;
    for (float v : img.data) m += v;
    m /= static_cast<double>(img.size());
    double var = 0.0;
    for (float v : img.data) var += (v - m) * (v - m);
    var /= static_cast<double>(img.size());
    const double s = std::sqrt(var);
    for (float& v : img.data) {
        const double z = s > 0.0 ? (v - m) / s : 0.0;
        double out = mean + sd * z;
        if (out < 0.0) out = 0.0;
        if (out > 1.0) out = 1.0;
        v = static_cast<float>(out);
    }
}

struct SynthParams {
    double class_weight = 0.6;     // shared structure strength
    double identity_weight = 0.4;  // per-identity structure strength
    std::vector<int> octave_cells = {24, 12, 6};
    std::vector<double> octave_weights = {0.55, 0.30, 0.15};
    float mean = 0.5f;
    float sd = 0.16f;
};

// Deterministic glyph for an identity: same (seed, identity, size) always
// yields the same pixels.
inline Raster make_glyph(std::uint64_t seed, std::uint32_t identity, int size,
                         const SynthParams& sp = {}) {
    SeededRng class_rng(derive_seed(seed, 0xC1A55));
    SeededRng id_rng(derive_seed(seed, 0x1D000000ULL + identity));
    const Raster class_part = value_noise(size, class_rng, sp.octave_cells, sp.octave_weights);
    const Raster id_part = value_noise(size, id_rng, sp.octave_cells, sp.octave_weights);
    Raster glyph(size, size, 0.0f);
    for (std::size_t i = 0; i < glyph.data.size(); ++i)
        glyph.data[i] = static_cast<float>(sp.class_weight * class_part.data[i] +
                                           sp.identity_weight * id_part.data[i]);
    standardize(glyph, sp.mean, sp.sd);
    return glyph;
}

// Pure texture with glyph-matched statistics; `tag` distinguishes draws.
inline Raster make_background(std::uint64_t seed, std::uint64_t tag, int size,
                              const SynthParams& sp = {}) {
    SeededRng rng(derive_seed(seed, 0xB6000000ULL + tag));
    Raster bg = value_noise(size, rng, sp.octave_cells, sp.octave_weights);
    standardize(bg, sp.mean, sp.sd);
    return bg;
}

struct LabeledImage {
    std::uint32_t identity = 0;
    std::uint32_t background = 0;
    Raster image;
};

struct ClutterDataset {
    int canvas = 0;
    int glyph = 0;
    std::vector<LabeledImage> images;
};

// The clutter task: every image is one identity's glyph at the canvas
// center over an independently drawn background (or a flat mid-gray one
// when `cluttered` is false). The only difference between images of the
// same identity is the background.
inline ClutterDataset gen_clutter_dataset(std::size_t n_ids, std::size_t n_bg, int canvas,
                                          int glyph, std::uint64_t seed,
                                          const SynthParams& sp = {}, bool cluttered = true) {
    if (n_ids < 1 || n_bg < 1) throw std::invalid_argument("dataset needs ids and backgrounds");
    if (glyph < 1 || canvas < glyph) throw std::invalid_argument("glyph must fit the canvas");
    ClutterDataset ds;
    ds.canvas = canvas;
    ds.glyph = glyph;
    const int off = (canvas - glyph) / 2;
    for (std::uint32_t id = 0; id < n_ids; ++id) {
        const Raster g = make_glyph(seed, id, glyph, sp);
        for (std::uint32_t b = 0; b < n_bg; ++b) {
            Raster img = cluttered
                             ? make_background(seed, static_cast<std::uint64_t>(id) * 1000003 + b,
                                               canvas, sp)
                             : Raster(canvas, canvas, sp.mean);
            paste(img, g, off, off);
            ds.images.push_back({id, b, std::move(img)});
        }
    }
    return ds;
}

// Template images from held-out identities (index space disjoint from any
// dataset identity), cropped to `crop` pixels at `crop_offset` within the
// glyph (-1 = centered).
inline std::vector<std::pair<Raster, std::string>> glyph_templates(std::size_t count, int glyph,
                                                                   int crop, int crop_offset,
                                                                   std::uint64_t seed,
                                                                   const SynthParams& sp = {}) {
    if (crop < 1 || crop > glyph) throw std::invalid_argument("bad template crop");
    const int off = crop_offset < 0 ? (glyph - crop) / 2 : crop_offset;
    if (off + crop > glyph) throw std::invalid_argument("template crop outside glyph");
    std::vector<std::pair<Raster, std::string>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t identity = 0x40000000u + static_cast<std::uint32_t>(i);
        const Raster g = make_glyph(seed, identity, glyph, sp);
        out.emplace_back(g.crop(off, off, crop, crop), "t" + std::to_string(i));
    }
    return out;
}

// Matched-count, matched-statistics pure-noise templates.
inline std::vector<std::pair<Raster, std::string>> noise_templates(std::size_t count, int crop,
                                                                   std::uint64_t seed,
                                                                   const SynthParams& sp = {}) {
    std::vector<std::pair<Raster, std::string>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Raster r = make_background(seed, 0x90000000ULL + i, crop, sp);
        out.emplace_back(std::move(r), "n" + std::to_string(i));
    }
    return out;
}

struct PairRef {
    std::size_t a = 0;
    std::size_t b = 0;
    bool same = false;
};

// Every unordered image pair, labeled by identity equality.
inline std::vector<PairRef> all_pairs(const ClutterDataset& ds) {
    std::vector<PairRef> out;
    for (std::size_t i = 0; i < ds.images.size(); ++i)
        for (std::size_t j = i + 1; j < ds.images.size(); ++j)
            out.push_back({i, j, ds.images[i].identity == ds.images[j].identity});
    return out;
}

// All same-identity pairs plus an equal number of different-identity pairs,
// sampled deterministically without replacement.
inline std::vector<PairRef> balanced_pairs(const ClutterDataset& ds, std::uint64_t seed) {
    std::vector<PairRef> same, diff;
    for (std::size_t i = 0; i < ds.images.size(); ++i)
        for (std::size_t j = i + 1; j < ds.images.size(); ++j)
            if (ds.images[i].identity == ds.images[j].identity) same.push_back({i, j, true});
    SeededRng rng(derive_seed(seed, 0x9A125));
    std::vector<bool> used(ds.images.size() * ds.images.size(), false);
    std::size_t guard = 0;
    while (diff.size() < same.size()) {
        if (++guard > same.size() * 1000 + 1000)
            throw std::runtime_error("cannot sample enough different-identity pairs");
        std::size_t i = rng.below(ds.images.size());
        std::size_t j = rng.below(ds.images.size());
        if (i == j || ds.images[i].identity == ds.images[j].identity) continue;
        if (i > j) std::swap(i, j);
        if (used[i * ds.images.size() + j]) continue;
        used[i * ds.images.size() + j] = true;
        diff.push_back({i, j, false});
    }
    std::vector<PairRef> out;
    out.reserve(same.size() * 2);
    for (std::size_t k = 0; k < same.size(); ++k) {
        out.push_back(same[k]);
        out.push_back(diff[k]);
    }
    return out;
}

// Jittered copy with parameters drawn from `ranges`.
inline Raster jittered_copy(const Raster& img, SeededRng& rng, const JitterRanges& ranges,
                            float fill = 0.5f) {
    return affine_jitter(img, sample_jitter(rng, ranges), fill);
}

}  // namespace hwstack
