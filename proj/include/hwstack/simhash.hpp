#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hwstack/common.hpp"

namespace hwstack {

// Random-hyperplane sign hashing. L tables of b hyperplanes each; the
// hyperplanes are unit gaussian directions drawn deterministically from
// (seed, dim, bits, tables), so codes are reproducible across runs.
struct HashFamily {
    int bits = 24;
    int tables = 20;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<float> planes;  // tables * bits rows of `dim`, row-major

    const float* plane(int table, int bit) const {
        return planes.data() + (static_cast<std::size_t>(table) * bits + bit) * dim;
    }
};

inline HashFamily make_hash_family(std::size_t dim, int bits, int tables, std::uint64_t seed) {
    if (bits < 1 || bits > 64) throw std::invalid_argument("hash bits must be in [1,64]");
    if (tables < 1) throw std::invalid_argument("need at least one hash table");
    if (dim == 0) throw std::invalid_argument("zero hash dimension");
    HashFamily fam;
    fam.bits = bits;
    fam.tables = tables;
    fam.dim = dim;
    fam.seed = seed;
    fam.planes.resize(static_cast<std::size_t>(tables) * bits * dim);
    SeededRng rng(derive_seed(seed, 0x68617368));
    for (std::size_t r = 0; r < static_cast<std::size_t>(tables) * bits; ++r) {
        float* p = fam.planes.data() + r * dim;
        double ss = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            p[i] = static_cast<float>(rng.normal());
            ss += static_cast<double>(p[i]) * p[i];
        }
        if (ss > 0.0) {
            const float inv = static_cast<float>(1.0 / std::sqrt(ss));
            for (std::size_t i = 0; i < dim; ++i) p[i] *= inv;
        }
    }
    return fam;
}

// b-bit sign code against an explicit set of hyperplanes. Bit i is set iff
// <v, plane_i> >= 0; summation runs in fixed index order.
inline std::uint64_t simhash(std::span<const float> v, const float* planes, int bits,
                             std::size_t dim) {
    if (v.size() != dim) throw std::invalid_argument("simhash dimension mismatch");
    std::uint64_t code = 0;
    for (int b = 0; b < bits; ++b) {
        const float* p = planes + static_cast<std::size_t>(b) * dim;
        double s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) s += static_cast<double>(v[i]) * p[i];
        if (s >= 0.0) code |= 1ull << b;
    }
    return code;
}

inline std::uint64_t simhash(std::span<const float> v, const HashFamily& fam, int table) {
    return simhash(v, fam.plane(table, 0), fam.bits, fam.dim);
}

// Codes for all L tables of one vector.
inline void simhash_all(std::span<const float> v, const HashFamily& fam, std::uint64_t* out) {
    for (int t = 0; t < fam.tables; ++t) out[t] = simhash(v, fam, t);
}

}  // namespace hwstack
