#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hwstack/common.hpp"
#include "hwstack/descriptor.hpp"
#include "hwstack/jitter.hpp"
#include "hwstack/raster.hpp"
#include "hwstack/windows.hpp"

namespace hwstack {

// One descriptor kind's worth of stored templates, packed row-major. A
// fused book carries two parts (HOG then LBP) whose response vectors are
// concatenated downstream; a plain book carries one.
struct BookPart {
    DescriptorKind kind = DescriptorKind::HOG;
    std::size_t dim = 0;
    std::vector<float> packed;

    std::size_t count() const { return dim ? packed.size() / dim : 0; }
    const float* desc(std::size_t i) const { return packed.data() + i * dim; }
    TemplateMatrix matrix() const { return TemplateMatrix{count(), dim, packed.data()}; }
};

// Layer-2 template store: every training image crossed with every rotation
// step. Template t = image_index * n_rotations + rotation_index.
struct TemplateBook {
    DescriptorKind kind = DescriptorKind::HOG;
    std::uint32_t window = 0;
    std::vector<double> rotations;        // degrees
    std::vector<std::string> identities;  // one per template image
    std::vector<BookPart> parts;

    std::size_t n_images() const { return identities.size(); }
    std::size_t n_rotations() const { return rotations.size(); }
    std::size_t count() const { return n_images() * n_rotations(); }
};

// Extract one descriptor per (image, rotation) pair. Images must already be
// cropped to the template window; rotation happens in place about the image
// center. Descriptors are unit-normalized as stored.
inline TemplateBook train_layer2(const std::vector<std::pair<Raster, std::string>>& images,
                                 const std::vector<double>& rotations,
                                 const DescriptorConfig& cfg, DescriptorKind kind,
                                 float fill = 0.5f) {
    if (images.empty()) throw std::invalid_argument("no template images");
    if (rotations.empty()) throw std::invalid_argument("no rotation steps");

    TemplateBook book;
    book.kind = kind;
    book.window = static_cast<std::uint32_t>(images.front().first.width);
    for (const auto& [img, id] : images) {
        if (img.width != img.height || img.width != static_cast<int>(book.window))
            throw std::invalid_argument("template image size mismatch with window size");
        book.identities.push_back(id);
    }
    book.rotations = rotations;

    std::vector<DescriptorKind> part_kinds;
    if (kind == DescriptorKind::FUSED)
        part_kinds = {DescriptorKind::HOG, DescriptorKind::LBP};
    else
        part_kinds = {kind};

    for (DescriptorKind pk : part_kinds) {
        BookPart part;
        part.kind = pk;
        for (const auto& [img, id] : images) {
            for (double deg : rotations) {
                Raster rot = deg == 0.0 ? img
                                        : affine_jitter(img, JitterParams{0.0, 0.0, 1.0, deg}, fill);
                Descriptor d = extract_descriptor(rot, pk, cfg);
                normalize_l2(d.values);
                if (part.dim == 0) part.dim = d.values.size();
                if (d.values.size() != part.dim)
                    throw std::runtime_error("inconsistent template descriptor dims");
                part.packed.insert(part.packed.end(), d.values.begin(), d.values.end());
            }
        }
        book.parts.push_back(std::move(part));
    }
    return book;
}

// Layer-3 store: per identity, the unit-normalized layer-2 response vectors
// of that identity's training images.
struct Layer3Group {
    std::string identity;
    std::vector<std::vector<double>> templates;
};

struct Layer3Set {
    std::size_t dim = 0;  // response-vector length
    std::vector<Layer3Group> groups;
};

inline void write_book(std::ostream& os, const TemplateBook& b) {
    put_u32(os, static_cast<std::uint32_t>(b.kind));
    put_u32(os, b.window);
    put_u32(os, static_cast<std::uint32_t>(b.n_images()));
    put_u32(os, static_cast<std::uint32_t>(b.n_rotations()));
    for (double r : b.rotations) put_f64(os, r);
    for (const std::string& id : b.identities) {
        put_u32(os, static_cast<std::uint32_t>(id.size()));
        os.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    put_u32(os, static_cast<std::uint32_t>(b.parts.size()));
    for (const BookPart& p : b.parts) {
        put_u32(os, static_cast<std::uint32_t>(p.kind));
        put_u32(os, static_cast<std::uint32_t>(p.dim));
        for (float v : p.packed) put_f32(os, v);
    }
}

inline TemplateBook read_book(std::istream& is) {
    TemplateBook b;
    b.kind = static_cast<DescriptorKind>(get_u32(is));
    b.window = get_u32(is);
    const std::uint32_t n_img = get_u32(is), n_rot = get_u32(is);
    b.rotations.resize(n_rot);
    for (double& r : b.rotations) r = get_f64(is);
    b.identities.resize(n_img);
    for (std::string& id : b.identities) {
        id.resize(get_u32(is));
        is.read(id.data(), static_cast<std::streamsize>(id.size()));
    }
    const std::uint32_t n_parts = get_u32(is);
    for (std::uint32_t i = 0; i < n_parts; ++i) {
        BookPart p;
        p.kind = static_cast<DescriptorKind>(get_u32(is));
        p.dim = get_u32(is);
        p.packed.resize(static_cast<std::size_t>(n_img) * n_rot * p.dim);
        for (float& v : p.packed) v = get_f32(is);
        b.parts.push_back(std::move(p));
    }
    if (!is) throw std::runtime_error("truncated template book");
    return b;
}

inline void write_layer3(std::ostream& os, const Layer3Set& l3) {
    put_u32(os, static_cast<std::uint32_t>(l3.dim));
    put_u32(os, static_cast<std::uint32_t>(l3.groups.size()));
    for (const Layer3Group& g : l3.groups) {
        put_u32(os, static_cast<std::uint32_t>(g.identity.size()));
        os.write(g.identity.data(), static_cast<std::streamsize>(g.identity.size()));
        put_u32(os, static_cast<std::uint32_t>(g.templates.size()));
        for (const auto& t : g.templates)
            for (double v : t) put_f64(os, v);
    }
}

inline Layer3Set read_layer3(std::istream& is) {
    Layer3Set l3;
    l3.dim = get_u32(is);
    l3.groups.resize(get_u32(is));
    for (Layer3Group& g : l3.groups) {
        g.identity.resize(get_u32(is));
        is.read(g.identity.data(), static_cast<std::streamsize>(g.identity.size()));
        g.templates.resize(get_u32(is));
        for (auto& t : g.templates) {
            t.resize(l3.dim);
            for (double& v : t) v = get_f64(is);
        }
    }
    if (!is) throw std::runtime_error("truncated layer-3 set");
    return l3;
}

}  // namespace hwstack
