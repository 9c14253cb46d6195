#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hwstack/hash_index.hpp"
#include "hwstack/hw.hpp"

namespace hwstack {

// Outcome of the voting step: retained window indices with their vote
// fractions, ordered by descending frequency, ties by ascending index.
struct ConsensusSet {
    std::vector<std::uint32_t> windows;
    std::vector<double> freqs;

    std::size_t size() const { return windows.size(); }
};

// Frequency vote across per-template candidate sets. The frequency of a
// window is the fraction of templates whose candidate set contains it; the
// top N windows by frequency are kept. Windows that collide with no
// template are never admitted, so fewer than N entries may be returned.
inline ConsensusSet vote(const std::vector<std::vector<std::uint32_t>>& candidates,
                         std::size_t n_windows, std::size_t N) {
    if (N < 1) throw std::invalid_argument("consensus size must be at least 1");
    std::vector<std::uint32_t> counts(n_windows, 0);
    for (const auto& c : candidates)
        for (std::uint32_t w : c) {
            if (w >= n_windows) throw std::invalid_argument("candidate window out of range");
            ++counts[w];
        }

    std::vector<std::uint32_t> order;
    order.reserve(n_windows);
    for (std::uint32_t w = 0; w < n_windows; ++w)
        if (counts[w] > 0) order.push_back(w);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return a < b;
    });
    if (order.size() > N) order.resize(N);

    ConsensusSet out;
    out.windows = std::move(order);
    out.freqs.reserve(out.windows.size());
    const double inv = candidates.empty() ? 0.0 : 1.0 / static_cast<double>(candidates.size());
    for (std::uint32_t w : out.windows) out.freqs.push_back(counts[w] * inv);
    return out;
}

// Exact scorer over unit-normalized rows: the normalized dot product of
// stored unit (or zero) vectors reduces to their plain dot product.
struct ExactScorer {
    const WindowBank* bank = nullptr;
    TemplateMatrix templates;

    double operator()(std::size_t w, std::size_t j) const {
        return dot({bank->desc(w), bank->dim}, templates.row_span(j));
    }
};

// Pool each template's scores over a fixed window subset.
template <class Scorer>
std::vector<double> pooled_responses(std::span<const std::uint32_t> windows,
                                     std::size_t n_templates, PoolKind pool,
                                     const Scorer& scorer, OpCounters* counters = nullptr,
                                     unsigned threads = 1) {
    std::vector<double> responses(n_templates, 0.0);
    if (windows.empty()) return responses;
    parallel_for(n_templates, threads, [&](std::size_t j) {
        double acc = pool == PoolKind::MAX ? -2.0 : 0.0;
        for (std::uint32_t w : windows) {
            const double s = scorer(w, j);
            if (pool == PoolKind::MAX)
                acc = s > acc ? s : acc;
            else
                acc += s;
        }
        responses[j] = pool == PoolKind::MAX ? acc : acc / static_cast<double>(windows.size());
    });
    if (counters)
        counters->dot_products.fetch_add(static_cast<std::uint64_t>(windows.size()) * n_templates,
                                         std::memory_order_relaxed);
    return responses;
}

// Full consensus-of-collisions response pass: hash the bank, collect
// per-template candidates, vote, then score only the consensus windows.
// N >= m disables pruning entirely (no hashing, every window scored), which
// makes the result identical to the exhaustive pass.
template <class Scorer>
std::vector<double> coc_responses(const WindowBank& bank, const HashIndex& index,
                                  const HashFamily& fam, std::size_t N, PoolKind pool,
                                  const Scorer& scorer, OpCounters* counters = nullptr,
                                  unsigned threads = 1) {
    const std::size_t m = bank.count();
    if (N >= m) {
        std::vector<std::uint32_t> all(m);
        std::iota(all.begin(), all.end(), 0u);
        return pooled_responses<Scorer>(all, index.n_templates, pool, scorer, counters, threads);
    }
    const auto candidates = collect_candidates(bank, index, fam, counters);
    const ConsensusSet consensus = vote(candidates, m, N);
    return pooled_responses<Scorer>(consensus.windows, index.n_templates, pool, scorer, counters,
                                    threads);
}

// Exhaustive baseline: every window scored for every template.
template <class Scorer>
std::vector<double> exhaustive_responses(const WindowBank& bank, std::size_t n_templates,
                                         PoolKind pool, const Scorer& scorer,
                                         OpCounters* counters = nullptr, unsigned threads = 1) {
    std::vector<std::uint32_t> all(bank.count());
    std::iota(all.begin(), all.end(), 0u);
    return pooled_responses<Scorer>(all, n_templates, pool, scorer, counters, threads);
}

}  // namespace hwstack
