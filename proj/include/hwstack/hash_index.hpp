#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hwstack/common.hpp"
#include "hwstack/simhash.hpp"
#include "hwstack/windows.hpp"

namespace hwstack {

// Per-table map from b-bit code to the bucket of template indices stored
// under it. Every template appears exactly once per table.
struct HashIndex {
    std::size_t n_templates = 0;
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>> tables;
};

inline HashIndex build_index(const TemplateMatrix& templates, const HashFamily& fam) {
    if (templates.n == 0) throw std::invalid_argument("empty template list");
    if (templates.dim != fam.dim) throw std::invalid_argument("index dimension mismatch");
    HashIndex idx;
    idx.n_templates = templates.n;
    idx.tables.resize(fam.tables);
    for (int t = 0; t < fam.tables; ++t) {
        auto& table = idx.tables[t];
        for (std::size_t j = 0; j < templates.n; ++j) {
            const std::uint64_t code = simhash(templates.row_span(j), fam, t);
            table[code].push_back(static_cast<std::uint32_t>(j));
        }
    }
    return idx;
}

struct OpCounters {
    std::atomic<std::uint64_t> dot_products{0};
    std::atomic<std::uint64_t> windows_hashed{0};
    std::atomic<std::uint64_t> buckets_probed{0};
    std::atomic<std::uint64_t> windows_projected{0};

    void reset() {
        dot_products = 0;
        windows_hashed = 0;
        buckets_probed = 0;
        windows_projected = 0;
    }
};

struct CounterSnapshot {
    std::uint64_t dot_products = 0;
    std::uint64_t windows_hashed = 0;
    std::uint64_t buckets_probed = 0;
    std::uint64_t windows_projected = 0;
};

inline CounterSnapshot snapshot(const OpCounters& c) {
    return {c.dot_products.load(), c.windows_hashed.load(), c.buckets_probed.load(),
            c.windows_projected.load()};
}

// Candidate windows per template: window w is in C_j iff its code equals
// template j's code in at least one of the L tables. Each returned list is
// sorted ascending and duplicate-free. Window rows are given as a matrix
// view so both raw bank descriptors and projected coefficients can be fed.
inline std::vector<std::vector<std::uint32_t>> collect_candidates(const TemplateMatrix& windows,
                                                                  const HashIndex& index,
                                                                  const HashFamily& fam,
                                                                  OpCounters* counters = nullptr) {
    if (windows.dim != fam.dim) throw std::invalid_argument("candidate dimension mismatch");
    if (index.tables.size() != static_cast<std::size_t>(fam.tables))
        throw std::invalid_argument("index/family table count mismatch");

    std::vector<std::vector<std::uint32_t>> cands(index.n_templates);
    const std::size_t m = windows.n;
    std::vector<std::uint64_t> codes(static_cast<std::size_t>(fam.tables));
    for (std::size_t w = 0; w < m; ++w) {
        simhash_all(windows.row_span(w), fam, codes.data());
        for (int t = 0; t < fam.tables; ++t) {
            const auto it = index.tables[t].find(codes[t]);
            if (it == index.tables[t].end()) continue;
            for (std::uint32_t j : it->second) cands[j].push_back(static_cast<std::uint32_t>(w));
        }
    }
    if (counters) {
        counters->windows_hashed.fetch_add(m, std::memory_order_relaxed);
        counters->buckets_probed.fetch_add(m * fam.tables, std::memory_order_relaxed);
    }
    for (auto& c : cands) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    return cands;
}

inline std::vector<std::vector<std::uint32_t>> collect_candidates(const WindowBank& bank,
                                                                  const HashIndex& index,
                                                                  const HashFamily& fam,
                                                                  OpCounters* counters = nullptr) {
    return collect_candidates(TemplateMatrix{bank.count(), bank.dim, bank.descs.data()}, index,
                              fam, counters);
}

// header (seed, b, L, dim, n) + per-table sorted (code, template-index)
// pairs, little-endian.
inline void write_index(std::ostream& os, const HashIndex& idx, const HashFamily& fam) {
    put_u64(os, fam.seed);
    put_u32(os, static_cast<std::uint32_t>(fam.bits));
    put_u32(os, static_cast<std::uint32_t>(fam.tables));
    put_u32(os, static_cast<std::uint32_t>(fam.dim));
    put_u32(os, static_cast<std::uint32_t>(idx.n_templates));
    for (const auto& table : idx.tables) {
        std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
        pairs.reserve(idx.n_templates);
        for (const auto& [code, bucket] : table)
            for (std::uint32_t j : bucket) pairs.emplace_back(code, j);
        std::sort(pairs.begin(), pairs.end());
        for (const auto& [code, j] : pairs) {
            put_u64(os, code);
            put_u32(os, j);
        }
    }
}

struct LoadedIndex {
    HashFamily fam;  // planes regenerated from the stored seed
    HashIndex index;
};

inline LoadedIndex read_index(std::istream& is) {
    LoadedIndex out;
    const std::uint64_t seed = get_u64(is);
    const std::uint32_t bits = get_u32(is);
    const std::uint32_t tables = get_u32(is);
    const std::uint32_t dim = get_u32(is);
    const std::uint32_t n = get_u32(is);
    out.fam = make_hash_family(dim, static_cast<int>(bits), static_cast<int>(tables), seed);
    out.index.n_templates = n;
    out.index.tables.resize(tables);
    for (std::uint32_t t = 0; t < tables; ++t) {
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint64_t code = get_u64(is);
            const std::uint32_t j = get_u32(is);
            out.index.tables[t][code].push_back(j);
        }
    }
    return out;
}

}  // namespace hwstack
