#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hwstack/consensus.hpp"
#include "hwstack/hash_index.hpp"
#include "hwstack/hw.hpp"
#include "hwstack/pca.hpp"
#include "hwstack/pyramid.hpp"
#include "hwstack/templatebook.hpp"
#include "hwstack/windows.hpp"

namespace hwstack {

struct EngineConfig {
    DescriptorKind kind = DescriptorKind::HOG;
    DescriptorConfig desc{};
    std::uint32_t window = 64;
    std::uint32_t stride = 8;
    std::vector<double> ratios = geometric_ratios(288.0 / 250.0, 150.0 / 250.0, 12);
    std::vector<double> rotations = {-12.0, -6.0, 0.0, 6.0, 12.0};
    PoolKind window_pool = PoolKind::MAX;    // over positions and scales
    PoolKind rotation_pool = PoolKind::MAX;  // over the rotation group
    PoolKind identity_pool = PoolKind::MAX;  // over same-identity layer-3 templates
    bool use_coc = true;
    std::uint32_t hash_bits = 24;
    std::uint32_t hash_tables = 20;
    std::uint32_t consensus = 500;  // N; pruning is skipped whenever N >= window count
    std::uint32_t pca_k = 250;      // 0 = exact scoring, no projection
    bool hash_projected = false;    // hash projected coefficients instead of raw descriptors
    float fill = 0.5f;
    std::uint64_t seed = 1;
    std::uint32_t threads = 1;  // 0 = all hardware threads

    unsigned effective_threads() const {
        if (threads > 0) return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }

    void validate() const {
        desc.validate();
        if (window < 1 || stride < 1) throw std::invalid_argument("bad window geometry");
        if (ratios.empty()) throw std::invalid_argument("empty pyramid ratio list");
        if (rotations.empty()) throw std::invalid_argument("empty rotation list");
        if (use_coc && consensus < 1) throw std::invalid_argument("consensus size must be >= 1");
        if (!std::isfinite(fill)) throw std::invalid_argument("non-finite fill value");
    }
};

struct VerifierModel {
    double tau = 0.0;
    double train_accuracy = 0.0;
};

// Scores in projected space; windows are looked up through a slot table so
// only the windows actually admitted for scoring get projected.
struct ProjectedScorer {
    const std::vector<ProjectedVec>* windows = nullptr;
    const std::vector<std::uint32_t>* slot = nullptr;
    const std::vector<ProjectedVec>* templates = nullptr;
    double mean_sq = 0.0;

    double operator()(std::size_t w, std::size_t j) const {
        return approx_ndot((*windows)[(*slot)[w]], (*templates)[j], mean_sq);
    }
};

// The trained matcher: layer-2 templates plus the per-part hash index and
// projection basis. Immutable after construction; queries are concurrently
// callable and feed a shared set of operation counters.
class Engine {
public:
    struct Part {
        std::size_t book_part = 0;
        bool hashing = false;
        bool projected = false;
        HashFamily fam;
        HashIndex index;
        ProjectionBasis basis;
        std::vector<ProjectedVec> proj_templates;
    };

    Engine(TemplateBook book, const EngineConfig& cfg) : book_(std::move(book)), cfg_(cfg) {
        cfg_.validate();
        if (book_.count() == 0) throw std::invalid_argument("empty template book");
        for (std::size_t pi = 0; pi < book_.parts.size(); ++pi) {
            const BookPart& bp = book_.parts[pi];
            Part part;
            part.book_part = pi;
            const TemplateMatrix tm = bp.matrix();

            part.projected = cfg_.pca_k > 0;
            if (part.projected) {
                const std::size_t k = std::min<std::size_t>(cfg_.pca_k, std::min(tm.n, tm.dim));
                part.basis = fit_pca(tm, k);
                part.proj_templates.reserve(tm.n);
                for (std::size_t j = 0; j < tm.n; ++j)
                    part.proj_templates.push_back(project(tm.row_span(j), part.basis));
            }

            part.hashing = cfg_.use_coc;
            if (part.hashing) {
                const std::uint64_t hseed = derive_seed(cfg_.seed, 0x100 + pi);
                if (cfg_.hash_projected && part.projected) {
                    const std::size_t k = part.basis.k();
                    if (k == 0)
                        throw std::runtime_error("cannot hash rank-0 projected templates");
                    std::vector<float> rows(tm.n * k);
                    for (std::size_t j = 0; j < tm.n; ++j)
                        for (std::size_t c = 0; c < k; ++c)
                            rows[j * k + c] =
                                static_cast<float>(part.proj_templates[j].coeffs[c]);
                    part.fam = make_hash_family(k, static_cast<int>(cfg_.hash_bits),
                                                static_cast<int>(cfg_.hash_tables), hseed);
                    part.index = build_index(TemplateMatrix{tm.n, k, rows.data()}, part.fam);
                } else {
                    part.fam = make_hash_family(tm.dim, static_cast<int>(cfg_.hash_bits),
                                                static_cast<int>(cfg_.hash_tables), hseed);
                    part.index = build_index(tm, part.fam);
                }
            }
            parts_.push_back(std::move(part));
        }
    }

    // Assemble from already-trained parts (bundle loading). Projected
    // template coefficients are cheap to recompute, so only the basis and
    // index are taken as stored state.
    Engine(TemplateBook book, const EngineConfig& cfg, std::vector<Part> parts)
        : book_(std::move(book)), cfg_(cfg), parts_(std::move(parts)) {
        cfg_.validate();
        if (book_.count() == 0) throw std::invalid_argument("empty template book");
        if (parts_.size() != book_.parts.size())
            throw std::invalid_argument("part count mismatch");
        for (std::size_t pi = 0; pi < parts_.size(); ++pi) {
            Part& part = parts_[pi];
            part.book_part = pi;
            const BookPart& bp = book_.parts[pi];
            const TemplateMatrix tm = bp.matrix();
            if (part.projected) {
                if (part.basis.dim != bp.dim)
                    throw std::invalid_argument("stored basis dimension mismatch");
                part.proj_templates.clear();
                part.proj_templates.reserve(tm.n);
                for (std::size_t j = 0; j < tm.n; ++j)
                    part.proj_templates.push_back(project(tm.row_span(j), part.basis));
            }
            if (part.hashing) {
                if (part.index.n_templates != tm.n)
                    throw std::invalid_argument("stored index template count mismatch");
                const std::size_t expect_dim =
                    (cfg_.hash_projected && part.projected) ? part.basis.k() : bp.dim;
                if (part.fam.dim != expect_dim)
                    throw std::invalid_argument("stored index dimension mismatch");
            }
        }
    }

    const TemplateBook& book() const { return book_; }
    const EngineConfig& config() const { return cfg_; }
    const std::vector<Part>& parts() const { return parts_; }
    OpCounters& counters() const { return counters_; }

    // Length of the layer-2 response vector: one entry per template image,
    // per descriptor part.
    std::size_t response_dim() const { return book_.n_images() * book_.parts.size(); }

    // Layer-2 pass: pyramid -> dense windows -> (pruned) scoring against
    // every template -> max/mean over positions and scales -> pool over the
    // rotation group, giving one response per template image. For a fused
    // book the two per-kind response vectors are unit-normalized and
    // concatenated.
    std::vector<double> layer2_signature(const Raster& img) const {
        const std::size_t n_img = book_.n_images();
        const std::size_t n_rot = book_.n_rotations();
        const unsigned threads = cfg_.effective_threads();
        const Pyramid pyr =
            build_pyramid(img, cfg_.ratios, cfg_.desc.min_window(book_.kind));

        std::vector<double> out;
        out.reserve(response_dim());
        for (const Part& part : parts_) {
            const BookPart& bp = book_.parts[part.book_part];
            const WindowBank bank = extract_windows(pyr, static_cast<int>(cfg_.window),
                                                    static_cast<int>(cfg_.stride), cfg_.desc,
                                                    bp.kind, threads);
            const std::vector<double> resp = part_responses(part, bp, bank, threads);

            std::vector<double> pooled(n_img);
            for (std::size_t i = 0; i < n_img; ++i)
                pooled[i] = hw_response(std::span<const double>(resp.data() + i * n_rot, n_rot),
                                        cfg_.rotation_pool);
            if (book_.kind == DescriptorKind::FUSED) normalize_l2(pooled);
            out.insert(out.end(), pooled.begin(), pooled.end());
        }
        return out;
    }

    // Layer-3 training: store each image's unit-normalized layer-2 response
    // vector under its identity, identities kept in first-appearance order.
    Layer3Set train_layer3(const std::vector<std::pair<Raster, std::string>>& images) const {
        if (images.empty()) throw std::invalid_argument("no layer-3 training images");
        Layer3Set l3;
        l3.dim = response_dim();
        for (const auto& [img, identity] : images) {
            if (identity.empty()) throw std::invalid_argument("empty identity label");
            std::vector<double> s = layer2_signature(img);
            normalize_l2(s);
            auto it = std::find_if(l3.groups.begin(), l3.groups.end(),
                                   [&](const Layer3Group& g) { return g.identity == identity; });
            if (it == l3.groups.end()) {
                l3.groups.push_back({identity, {}});
                it = std::prev(l3.groups.end());
            }
            it->templates.push_back(std::move(s));
        }
        return l3;
    }

    // Full signature: one entry per identity group, pooled over that group's
    // stored layer-3 templates.
    std::vector<double> signature(const Raster& img, const Layer3Set& l3) const {
        if (l3.groups.empty()) throw std::invalid_argument("empty layer-3 set");
        std::vector<double> s = layer2_signature(img);
        if (s.size() != l3.dim) throw std::invalid_argument("layer-3 dimension mismatch");
        normalize_l2(s);
        std::vector<double> sig(l3.groups.size());
        std::vector<double> scores;
        for (std::size_t g = 0; g < l3.groups.size(); ++g) {
            const Layer3Group& grp = l3.groups[g];
            if (grp.templates.empty()) throw std::invalid_argument("empty identity group");
            scores.clear();
            for (const auto& t : grp.templates) scores.push_back(ndot(s, t));
            sig[g] = hw_response(scores, cfg_.identity_pool);
        }
        return sig;
    }

    double verify_score(const Raster& a, const Raster& b, const Layer3Set& l3) const {
        return ndot(signature(a, l3), signature(b, l3));
    }

    bool verify(const Raster& a, const Raster& b, const Layer3Set& l3, const VerifierModel& model,
                double* score_out = nullptr) const {
        const double score = verify_score(a, b, l3);
        if (score_out) *score_out = score;
        return score > model.tau;
    }

private:
    // One part's layer-2 template responses for a window bank: choose the
    // window subset (all of them, or the voted consensus), project if a
    // basis is active, then pool scores per template.
    std::vector<double> part_responses(const Part& part, const BookPart& bp,
                                       const WindowBank& bank, unsigned threads) const {
        const std::size_t m = bank.count();
        const std::size_t n = bp.count();
        const TemplateMatrix tm = bp.matrix();
        const bool hash_proj = part.hashing && part.projected && cfg_.hash_projected;

        std::vector<ProjectedVec> proj_windows;
        std::vector<std::uint32_t> slot(part.projected ? m : 0,
                                        std::numeric_limits<std::uint32_t>::max());
        const auto project_window = [&](std::uint32_t w) {
            slot[w] = static_cast<std::uint32_t>(proj_windows.size());
            proj_windows.push_back(project(std::span<const float>(bank.desc(w), bank.dim),
                                           part.basis));
        };

        // pick the window subset
        std::vector<std::uint32_t> selected;
        if (part.hashing && cfg_.consensus < m) {
            std::vector<std::vector<std::uint32_t>> cands;
            if (hash_proj) {
                // project everything up front, hash the coefficient rows
                const std::size_t k = part.basis.k();
                std::vector<float> rows(m * k);
                for (std::uint32_t w = 0; w < m; ++w) {
                    project_window(w);
                    for (std::size_t c = 0; c < k; ++c)
                        rows[static_cast<std::size_t>(w) * k + c] =
                            static_cast<float>(proj_windows[w].coeffs[c]);
                }
                counters_.windows_projected.fetch_add(m, std::memory_order_relaxed);
                cands = collect_candidates(TemplateMatrix{m, k, rows.data()}, part.index,
                                           part.fam, &counters_);
            } else {
                cands = collect_candidates(bank, part.index, part.fam, &counters_);
            }
            const ConsensusSet cs = vote(cands, m, cfg_.consensus);
            selected = cs.windows;
        } else {
            selected.resize(m);
            std::iota(selected.begin(), selected.end(), 0u);
        }

        if (part.projected && !hash_proj) {
            for (std::uint32_t w : selected) project_window(w);
            counters_.windows_projected.fetch_add(selected.size(), std::memory_order_relaxed);
        }

        if (part.projected) {
            const ProjectedScorer scorer{&proj_windows, &slot, &part.proj_templates,
                                         part.basis.mean_sq};
            return pooled_responses(std::span<const std::uint32_t>(selected), n,
                                    cfg_.window_pool, scorer, &counters_, threads);
        }
        const ExactScorer scorer{&bank, tm};
        return pooled_responses(std::span<const std::uint32_t>(selected), n, cfg_.window_pool,
                                scorer, &counters_, threads);
    }

    TemplateBook book_;
    EngineConfig cfg_;
    std::vector<Part> parts_;
    mutable OpCounters counters_;
};

// Threshold fit: sweep the midpoints between consecutive distinct scores
// (plus one candidate below the minimum and one above the maximum) and keep
// the accuracy-maximizing tau. Accuracy ties are broken toward the widest
// score gap, then toward the smaller tau. Prediction rule: same iff
// score > tau.
inline VerifierModel fit_threshold(const std::vector<std::pair<double, bool>>& scores) {
    if (scores.empty()) throw std::invalid_argument("no scores to fit");
    std::size_t n_same = 0;
    for (const auto& [s, same] : scores) n_same += same ? 1 : 0;
    if (n_same == 0 || n_same == scores.size())
        throw std::invalid_argument("threshold fit needs both classes");

    std::vector<double> distinct;
    distinct.reserve(scores.size());
    for (const auto& [s, same] : scores) distinct.push_back(s);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    struct Candidate {
        double tau;
        double gap;  // width of the score gap this tau bisects; 0 for endpoints
    };
    std::vector<Candidate> cands;
    cands.push_back({distinct.front() - 1.0, 0.0});
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
        cands.push_back({0.5 * (distinct[i] + distinct[i + 1]), distinct[i + 1] - distinct[i]});
    cands.push_back({distinct.back() + 1.0, 0.0});

    // candidates ascend in tau, so "first wins" on full ties keeps the
    // smallest qualifying tau
    VerifierModel best;
    double best_gap = -1.0;
    std::size_t best_correct = 0;
    bool first = true;
    for (const Candidate& c : cands) {
        std::size_t correct = 0;
        for (const auto& [s, same] : scores)
            if ((s > c.tau) == same) ++correct;
        if (first || correct > best_correct || (correct == best_correct && c.gap > best_gap)) {
            best.tau = c.tau;
            best_correct = correct;
            best_gap = c.gap;
            first = false;
        }
    }
    best.train_accuracy = static_cast<double>(best_correct) / static_cast<double>(scores.size());
    return best;
}

}  // namespace hwstack
