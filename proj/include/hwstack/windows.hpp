#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "hwstack/common.hpp"
#include "hwstack/lbp.hpp"
#include "hwstack/pyramid.hpp"

namespace hwstack {

struct WindowRef {
    std::uint32_t level = 0;
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t w = 0;
    std::uint32_t h = 0;
};

// Packed row-major view over descriptor rows.
struct TemplateMatrix {
    std::size_t n = 0;
    std::size_t dim = 0;
    const float* data = nullptr;

    const float* row(std::size_t j) const { return data + j * dim; }
    std::span<const float> row_span(std::size_t j) const { return {row(j), dim}; }
};

// Dense window descriptors over a pyramid. Descriptors are unit-L2
// normalized; flat patches keep their all-zero descriptor so window indices
// stay stable. Storage is a packed row-major matrix, one row per window.
struct WindowBank {
    DescriptorKind kind = DescriptorKind::HOG;
    std::size_t dim = 0;
    std::vector<WindowRef> refs;
    std::vector<float> descs;  // refs.size() * dim

    std::size_t count() const { return refs.size(); }
    const float* desc(std::size_t i) const { return descs.data() + i * dim; }
    float* desc(std::size_t i) { return descs.data() + i * dim; }
};

// All windows of size `win` at stride-aligned positions fully inside each
// pyramid level, ordered level-major then row-major. Levels too small for
// the window are skipped; it is an error if every level is.
inline WindowBank extract_windows(const Pyramid& pyr, int win, int stride,
                                  const DescriptorConfig& cfg, DescriptorKind kind,
                                  unsigned threads = 1) {
    if (win < 1 || stride < 1) throw std::invalid_argument("bad window geometry");
    if (win < cfg.min_window(kind))
        throw std::invalid_argument("window smaller than descriptor minimum");

    WindowBank bank;
    bank.kind = kind;
    for (std::size_t l = 0; l < pyr.levels.size(); ++l) {
        const Raster& img = pyr.levels[l].image;
        if (img.width < win || img.height < win) continue;
        for (int y = 0; y + win <= img.height; y += stride)
            for (int x = 0; x + win <= img.width; x += stride)
                bank.refs.push_back({static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(x),
                                     static_cast<std::uint32_t>(y), static_cast<std::uint32_t>(win),
                                     static_cast<std::uint32_t>(win)});
    }
    if (bank.refs.empty()) throw std::invalid_argument("no pyramid level admits a window");

    // probe dimension once
    {
        const WindowRef& r0 = bank.refs.front();
        const Raster patch = pyr.levels[r0.level].image.crop(static_cast<int>(r0.x),
                                                             static_cast<int>(r0.y), win, win);
        bank.dim = extract_descriptor(patch, kind, cfg).dim();
    }
    bank.descs.assign(bank.count() * bank.dim, 0.0f);

    parallel_for(bank.count(), threads, [&](std::size_t i) {
        const WindowRef& r = bank.refs[i];
        const Raster patch = pyr.levels[r.level].image.crop(static_cast<int>(r.x),
                                                            static_cast<int>(r.y), win, win);
        Descriptor d = extract_descriptor(patch, kind, cfg);
        if (d.dim() != bank.dim) throw std::runtime_error("inconsistent descriptor dim");
        normalize_l2(d.values);
        std::copy(d.values.begin(), d.values.end(), bank.desc(i));
    });
    return bank;
}

// header (count, dim, kind) + packed refs + packed float vectors
inline void write_bank(std::ostream& os, const WindowBank& bank) {
    put_u32(os, static_cast<std::uint32_t>(bank.count()));
    put_u32(os, static_cast<std::uint32_t>(bank.dim));
    put_u32(os, static_cast<std::uint32_t>(bank.kind));
    for (const WindowRef& r : bank.refs) {
        put_u32(os, r.level);
        put_u32(os, r.x);
        put_u32(os, r.y);
        put_u32(os, r.w);
        put_u32(os, r.h);
    }
    for (float v : bank.descs) put_f32(os, v);
}

inline WindowBank read_bank(std::istream& is) {
    WindowBank bank;
    const std::uint32_t n = get_u32(is);
    bank.dim = get_u32(is);
    const std::uint32_t tag = get_u32(is);
    if (tag > 2) throw std::runtime_error("bad bank kind tag");
    bank.kind = static_cast<DescriptorKind>(tag);
    bank.refs.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        bank.refs[i].level = get_u32(is);
        bank.refs[i].x = get_u32(is);
        bank.refs[i].y = get_u32(is);
        bank.refs[i].w = get_u32(is);
        bank.refs[i].h = get_u32(is);
    }
    bank.descs.resize(static_cast<std::size_t>(n) * bank.dim);
    for (float& v : bank.descs) v = get_f32(is);
    return bank;
}

}  // namespace hwstack
