#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hwstack/engine.hpp"
#include "hwstack/lbp.hpp"
#include "hwstack/metrics.hpp"
#include "hwstack/synth.hpp"

namespace hwstack {

// Tabular benchmark artifact: a config-echo header plus labeled rows,
// writable as CSV or as an aligned text table. Everything except wall-time
// columns is deterministic given the seeds echoed in the header.
struct BenchReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) {
        if (row.size() != columns.size()) throw std::invalid_argument("report row width mismatch");
        rows.push_back(std::move(row));
    }

    void write_csv(std::ostream& os) const {
        os << "# " << name << '\n';
        for (const auto& [k, v] : header) os << "# " << k << " = " << v << '\n';
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << (c ? "," : "") << columns[c];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
            os << '\n';
        }
    }

    void write_table(std::ostream& os) const {
        os << name << '\n';
        for (const auto& [k, v] : header) os << "  " << k << " = " << v << '\n';
        std::vector<std::size_t> width(columns.size());
        for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
        for (const auto& row : rows)
            for (std::size_t c = 0; c < row.size(); ++c)
                width[c] = std::max(width[c], row[c].size());
        const auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                os << row[c] << std::string(width[c] - row[c].size(), ' ');
                os << (c + 1 < row.size() ? "  " : "");
            }
            os << '\n';
        };
        emit(columns);
        for (const auto& row : rows) emit(row);
    }
};

// Layer-2 signatures for a batch of images; each call parallelizes
// internally over templates.
inline std::vector<std::vector<double>> batch_signatures(const Engine& engine,
                                                         const std::vector<LabeledImage>& images) {
    std::vector<std::vector<double>> sigs;
    sigs.reserve(images.size());
    for (const LabeledImage& li : images) sigs.push_back(engine.layer2_signature(li.image));
    return sigs;
}

inline std::vector<std::pair<double, bool>> pair_scores(
    const std::vector<PairRef>& pairs, const std::vector<std::vector<double>>& sigs) {
    std::vector<std::pair<double, bool>> out;
    out.reserve(pairs.size());
    for (const PairRef& p : pairs) out.emplace_back(ndot(sigs[p.a], sigs[p.b]), p.same);
    return out;
}

// Deterministic half/half split (alternating), tau fitted on the first
// half, accuracy reported on the second.
struct VerifyOutcome {
    double tau = 0.0;
    double fit_accuracy = 0.0;
    double eval_accuracy = 0.0;
};

inline std::vector<std::pair<double, bool>> even_half(
    const std::vector<std::pair<double, bool>>& s) {
    std::vector<std::pair<double, bool>> out;
    for (std::size_t i = 0; i < s.size(); i += 2) out.push_back(s[i]);
    return out;
}

inline std::vector<std::pair<double, bool>> odd_half(
    const std::vector<std::pair<double, bool>>& s) {
    std::vector<std::pair<double, bool>> out;
    for (std::size_t i = 1; i < s.size(); i += 2) out.push_back(s[i]);
    return out;
}

inline VerifyOutcome fit_and_eval(const std::vector<std::pair<double, bool>>& scored) {
    const VerifierModel model = fit_threshold(even_half(scored));
    VerifyOutcome out;
    out.tau = model.tau;
    out.fit_accuracy = model.train_accuracy;
    out.eval_accuracy = accuracy_at(odd_half(scored), model.tau);
    return out;
}

inline void split_auc(const std::vector<std::pair<double, bool>>& scored, double& auc_out) {
    std::vector<double> pos, neg;
    for (const auto& [s, same] : scored) (same ? pos : neg).push_back(s);
    auc_out = auc_rank_sum(pos, neg);
}

// ---- clutter / template-size sweep ----------------------------------------

struct ClutterRow {
    int size = 0;
    double auc_glyph_cluttered = 0.0;
    double auc_noise_cluttered = 0.0;
    double auc_glyph_clean = 0.0;
    double auc_noise_clean = 0.0;
    double seconds = 0.0;
};

struct ClutterSweepResult {
    std::vector<ClutterRow> rows;
    std::uint64_t seed = 0;
    std::size_t n_templates = 0;

    BenchReport report() const {
        BenchReport r;
        r.name = "clutter template-size sweep";
        r.header = {{"seed", std::to_string(seed)},
                    {"templates_per_bank", std::to_string(n_templates)}};
        r.columns = {"template_size",   "auc_glyph_cluttered", "auc_noise_cluttered",
                     "auc_glyph_clean", "auc_noise_clean",     "seconds"};
        for (const ClutterRow& row : rows)
            r.add_row({std::to_string(row.size), fmt_fixed(row.auc_glyph_cluttered, 4),
                       fmt_fixed(row.auc_noise_cluttered, 4), fmt_fixed(row.auc_glyph_clean, 4),
                       fmt_fixed(row.auc_noise_clean, 4), fmt_fixed(row.seconds, 3)});
        return r;
    }
};

// Per template size: banks of held-out-identity glyph crops and of matched
// noise patches, scored on the cluttered and clutter-free datasets; AUC of
// same/different over all image pairs.
inline ClutterSweepResult clutter_sweep(const std::vector<int>& sizes,
                                        const ClutterDataset& cluttered,
                                        const ClutterDataset& clean, std::size_t n_templates,
                                        std::uint64_t seed, const SynthParams& sp,
                                        const EngineConfig& proto) {
    if (sizes.empty()) throw std::invalid_argument("empty size grid");
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
        if (sizes[i] >= sizes[i + 1]) throw std::invalid_argument("sizes must ascend");
    if (sizes.back() > cluttered.canvas || sizes.back() > cluttered.glyph)
        throw std::invalid_argument("template size exceeds canvas or glyph");

    const std::vector<PairRef> pairs_cluttered = all_pairs(cluttered);
    const std::vector<PairRef> pairs_clean = all_pairs(clean);

    ClutterSweepResult out;
    out.seed = seed;
    out.n_templates = n_templates;
    for (int size : sizes) {
        const Stopwatch sw;
        EngineConfig cfg = proto;
        cfg.window = static_cast<std::uint32_t>(size);
        cfg.ratios = {1.0};
        cfg.rotations = {0.0};
        cfg.use_coc = false;
        cfg.pca_k = 0;

        ClutterRow row;
        row.size = size;
        {
            const auto imgs = glyph_templates(n_templates, cluttered.glyph, size, -1, seed, sp);
            const Engine engine(train_layer2(imgs, cfg.rotations, cfg.desc, cfg.kind, cfg.fill),
                                cfg);
            std::vector<std::pair<double, bool>> s;
            s = pair_scores(pairs_cluttered, batch_signatures(engine, cluttered.images));
            split_auc(s, row.auc_glyph_cluttered);
            s = pair_scores(pairs_clean, batch_signatures(engine, clean.images));
            split_auc(s, row.auc_glyph_clean);
        }
        {
            const auto imgs = noise_templates(n_templates, size, seed, sp);
            const Engine engine(train_layer2(imgs, cfg.rotations, cfg.desc, cfg.kind, cfg.fill),
                                cfg);
            std::vector<std::pair<double, bool>> s;
            s = pair_scores(pairs_cluttered, batch_signatures(engine, cluttered.images));
            split_auc(s, row.auc_noise_cluttered);
            s = pair_scores(pairs_clean, batch_signatures(engine, clean.images));
            split_auc(s, row.auc_noise_clean);
        }
        row.seconds = sw.seconds();
        out.rows.push_back(row);
    }
    return out;
}

// ---- consensus-count sweep -------------------------------------------------

struct ConsensusRow {
    std::string label;
    std::size_t N = 0;  // 0 = exhaustive baseline
    double accuracy = 0.0;
    double tau = 0.0;
    CounterSnapshot ops;
    double seconds = 0.0;
};

struct ConsensusSweepResult {
    std::vector<ConsensusRow> rows;
    std::size_t windows_per_image = 0;
    std::size_t n_templates = 0;
    std::uint64_t seed = 0;

    BenchReport report() const {
        BenchReport r;
        r.name = "consensus-count sweep";
        r.header = {{"seed", std::to_string(seed)},
                    {"templates", std::to_string(n_templates)},
                    {"windows_per_image", std::to_string(windows_per_image)}};
        r.columns = {"consensus", "accuracy",      "tau",     "dot_products",
                     "windows_hashed", "buckets_probed", "seconds"};
        for (const ConsensusRow& row : rows)
            r.add_row({row.label, fmt_fixed(row.accuracy, 4), fmt_fixed(row.tau, 6),
                       std::to_string(row.ops.dot_products), std::to_string(row.ops.windows_hashed),
                       std::to_string(row.ops.buckets_probed), fmt_fixed(row.seconds, 3)});
        return r;
    }
};

// Verification accuracy and workload counters across consensus sizes, with
// the exhaustive (no pruning, no hashing) run appended as the last row.
inline ConsensusSweepResult consensus_sweep(const std::vector<std::size_t>& n_values,
                                            const ClutterDataset& ds, std::size_t n_templates,
                                            int crop_offset, std::uint64_t seed,
                                            const SynthParams& sp, const EngineConfig& proto) {
    for (std::size_t i = 0; i + 1 < n_values.size(); ++i)
        if (n_values[i] >= n_values[i + 1])
            throw std::invalid_argument("consensus values must ascend");

    const auto imgs =
        glyph_templates(n_templates, ds.glyph, static_cast<int>(proto.window), crop_offset, seed,
                        sp);
    const TemplateBook book = train_layer2(imgs, {0.0}, proto.desc, proto.kind, proto.fill);
    const std::vector<PairRef> pairs = balanced_pairs(ds, seed);

    ConsensusSweepResult out;
    out.n_templates = book.count();
    out.seed = seed;

    const auto run_row = [&](EngineConfig cfg, const std::string& label, std::size_t N) {
        const Stopwatch sw;
        const Engine engine(book, cfg);
        engine.counters().reset();
        const auto sigs = batch_signatures(engine, ds.images);
        const auto scored = pair_scores(pairs, sigs);
        const VerifyOutcome v = fit_and_eval(scored);
        ConsensusRow row;
        row.label = label;
        row.N = N;
        row.accuracy = v.eval_accuracy;
        row.tau = v.tau;
        row.ops = snapshot(engine.counters());
        row.seconds = sw.seconds();
        out.rows.push_back(row);
        if (out.windows_per_image == 0 && !ds.images.empty()) {
            const Pyramid pyr = build_pyramid(ds.images.front().image, cfg.ratios);
            out.windows_per_image = extract_windows(pyr, static_cast<int>(cfg.window),
                                                    static_cast<int>(cfg.stride), cfg.desc,
                                                    cfg.kind)
                                        .count();
        }
    };

    for (std::size_t N : n_values) {
        EngineConfig cfg = proto;
        cfg.use_coc = true;
        cfg.consensus = static_cast<std::uint32_t>(N);
        cfg.pca_k = 0;
        run_row(cfg, "N=" + std::to_string(N), N);
    }
    EngineConfig cfg = proto;
    cfg.use_coc = false;
    cfg.pca_k = 0;
    run_row(cfg, "exhaustive", 0);
    return out;
}

// ---- jitter robustness -----------------------------------------------------

struct JitterBenchResult {
    double pipeline_original = 0.0;
    double pipeline_jittered = 0.0;
    double baseline_original = 0.0;
    double baseline_jittered = 0.0;
    double tau_pipeline = 0.0;
    double tau_baseline = 0.0;
    double seconds = 0.0;
    std::uint64_t seed = 0;
    JitterRanges ranges;

    BenchReport report() const {
        BenchReport r;
        r.name = "jitter robustness";
        r.header = {{"seed", std::to_string(seed)},
                    {"dx", fmt_double(ranges.dx_min) + ".." + fmt_double(ranges.dx_max)},
                    {"dy", fmt_double(ranges.dy_min) + ".." + fmt_double(ranges.dy_max)},
                    {"scale", fmt_double(ranges.scale_min) + ".." + fmt_double(ranges.scale_max)},
                    {"rotation",
                     fmt_double(ranges.rot_min) + ".." + fmt_double(ranges.rot_max)},
                    {"seconds", fmt_fixed(seconds, 3)}};
        r.columns = {"matcher", "accuracy_original", "accuracy_jittered", "tau"};
        r.add_row({"pipeline", fmt_fixed(pipeline_original, 4), fmt_fixed(pipeline_jittered, 4),
                   fmt_fixed(tau_pipeline, 6)});
        r.add_row({"descriptor_baseline", fmt_fixed(baseline_original, 4),
                   fmt_fixed(baseline_jittered, 4), fmt_fixed(tau_baseline, 6)});
        return r;
    }
};

// Same trained model evaluated on the original images and on jittered
// copies; a raw center-crop descriptor cosine runs as the baseline the
// hierarchy is supposed to beat under jitter.
inline JitterBenchResult jitter_bench(const ClutterDataset& ds, const JitterRanges& ranges,
                                      std::size_t n_templates, std::uint64_t seed,
                                      const SynthParams& sp, const EngineConfig& proto) {
    ranges.validate();
    const Stopwatch sw;
    const auto imgs = glyph_templates(n_templates, ds.glyph, static_cast<int>(proto.window), -1,
                                      seed, sp);
    EngineConfig cfg = proto;
    cfg.use_coc = false;
    cfg.pca_k = 0;
    const Engine engine(train_layer2(imgs, cfg.rotations, cfg.desc, cfg.kind, cfg.fill), cfg);

    std::vector<LabeledImage> jittered;
    jittered.reserve(ds.images.size());
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
        SeededRng rng(derive_seed(seed, 0x117000 + i));
        jittered.push_back({ds.images[i].identity, ds.images[i].background,
                            jittered_copy(ds.images[i].image, rng, ranges, cfg.fill)});
    }

    const std::vector<PairRef> pairs = balanced_pairs(ds, seed);
    JitterBenchResult out;
    out.seed = seed;
    out.ranges = ranges;

    {
        const auto orig = pair_scores(pairs, batch_signatures(engine, ds.images));
        const auto jit = pair_scores(pairs, batch_signatures(engine, jittered));
        const VerifierModel model = fit_threshold(even_half(orig));
        out.tau_pipeline = model.tau;
        out.pipeline_original = accuracy_at(odd_half(orig), model.tau);
        out.pipeline_jittered = accuracy_at(odd_half(jit), model.tau);
    }
    {
        const int crop = static_cast<int>(proto.window);
        const auto crop_desc = [&](const Raster& img) {
            const int off_x = (img.width - crop) / 2, off_y = (img.height - crop) / 2;
            Descriptor d = extract_descriptor(img.crop(off_x, off_y, crop, crop), proto.kind,
                                              proto.desc);
            normalize_l2(d.values);
            return d.values;
        };
        std::vector<std::vector<float>> orig_d, jit_d;
        for (const auto& li : ds.images) orig_d.push_back(crop_desc(li.image));
        for (const auto& li : jittered) jit_d.push_back(crop_desc(li.image));
        std::vector<std::pair<double, bool>> orig, jit;
        for (const PairRef& p : pairs) {
            orig.emplace_back(ndot(orig_d[p.a], orig_d[p.b]), p.same);
            jit.emplace_back(ndot(jit_d[p.a], jit_d[p.b]), p.same);
        }
        const VerifierModel model = fit_threshold(even_half(orig));
        out.tau_baseline = model.tau;
        out.baseline_original = accuracy_at(odd_half(orig), model.tau);
        out.baseline_jittered = accuracy_at(odd_half(jit), model.tau);
    }
    out.seconds = sw.seconds();
    return out;
}

// ---- speedup accounting ------------------------------------------------------

struct SpeedupRow {
    std::string label;
    double per_image_seconds = 0.0;
    double speedup = 1.0;
    double accuracy = 0.0;
    CounterSnapshot ops;
    std::size_t memory_bytes = 0;
};

struct SpeedupBenchResult {
    std::vector<SpeedupRow> rows;
    std::size_t windows_per_image = 0;
    std::size_t n_templates = 0;
    std::uint64_t seed = 0;

    BenchReport report() const {
        BenchReport r;
        r.name = "speedup accounting";
        r.header = {{"seed", std::to_string(seed)},
                    {"templates", std::to_string(n_templates)},
                    {"windows_per_image", std::to_string(windows_per_image)}};
        r.columns = {"config",      "per_image_seconds", "speedup",        "accuracy",
                     "dot_products", "windows_hashed",    "windows_projected", "memory_bytes"};
        for (const SpeedupRow& row : rows)
            r.add_row({row.label, fmt_fixed(row.per_image_seconds, 6), fmt_fixed(row.speedup, 2),
                       fmt_fixed(row.accuracy, 4), std::to_string(row.ops.dot_products),
                       std::to_string(row.ops.windows_hashed),
                       std::to_string(row.ops.windows_projected),
                       std::to_string(row.memory_bytes)});
        return r;
    }
};

inline std::size_t engine_memory_estimate(const Engine& engine, std::size_t windows_per_image) {
    std::size_t bytes = 0;
    for (const BookPart& bp : engine.book().parts) {
        bytes += bp.packed.size() * sizeof(float);
        bytes += windows_per_image * bp.dim * sizeof(float);  // one image's window bank
    }
    for (const Engine::Part& part : engine.parts()) {
        if (part.projected) {
            bytes += (part.basis.basis.size() + part.basis.mean.size() +
                      part.basis.singular_values.size()) *
                     sizeof(double);
            for (const ProjectedVec& p : part.proj_templates)
                bytes += p.coeffs.size() * sizeof(double) + 2 * sizeof(double);
        }
        if (part.hashing) {
            bytes += part.fam.planes.size() * sizeof(float);
            bytes += part.index.n_templates * part.index.tables.size() *
                     (sizeof(std::uint32_t) + sizeof(std::uint64_t));
        }
    }
    return bytes;
}

// Wall time, workload counters, and verification accuracy for the
// exhaustive baseline against hashing-only, projection-only, and combined
// configurations, all sharing one template book.
inline SpeedupBenchResult speedup_bench(const ClutterDataset& ds, std::size_t n_templates,
                                        std::size_t n_eval, int crop_offset, std::size_t coc_N,
                                        std::size_t pca_k, std::uint64_t seed,
                                        const SynthParams& sp, const EngineConfig& proto) {
    if (n_eval < 2 || n_eval > ds.images.size())
        throw std::invalid_argument("bad evaluation image count");
    const auto imgs = glyph_templates(n_templates, ds.glyph, static_cast<int>(proto.window),
                                      crop_offset, seed, sp);
    const TemplateBook book = train_layer2(imgs, {0.0}, proto.desc, proto.kind, proto.fill);

    ClutterDataset eval_ds;
    eval_ds.canvas = ds.canvas;
    eval_ds.glyph = ds.glyph;
    eval_ds.images.assign(ds.images.begin(), ds.images.begin() + static_cast<long>(n_eval));
    const std::vector<PairRef> pairs = balanced_pairs(eval_ds, seed);

    SpeedupBenchResult out;
    out.n_templates = book.count();
    out.seed = seed;

    struct ConfigSpec {
        std::string label;
        bool coc;
        std::size_t k;
    };
    const std::vector<ConfigSpec> specs = {{"exhaustive", false, 0},
                                           {"hash_only", true, 0},
                                           {"pca_only", false, pca_k},
                                           {"pca_hash", true, pca_k}};
    for (const ConfigSpec& spec : specs) {
        EngineConfig cfg = proto;
        cfg.use_coc = spec.coc;
        cfg.consensus = static_cast<std::uint32_t>(coc_N);
        cfg.pca_k = static_cast<std::uint32_t>(spec.k);
        const Engine engine(book, cfg);
        engine.counters().reset();

        const Stopwatch sw;
        const auto sigs = batch_signatures(engine, eval_ds.images);
        const double elapsed = sw.seconds();

        if (out.windows_per_image == 0) {
            const Pyramid pyr = build_pyramid(eval_ds.images.front().image, cfg.ratios);
            out.windows_per_image = extract_windows(pyr, static_cast<int>(cfg.window),
                                                    static_cast<int>(cfg.stride), cfg.desc,
                                                    cfg.kind)
                                        .count();
        }

        SpeedupRow row;
        row.label = spec.label;
        row.per_image_seconds = elapsed / static_cast<double>(n_eval);
        row.ops = snapshot(engine.counters());
        row.memory_bytes = engine_memory_estimate(engine, out.windows_per_image);
        const VerifyOutcome v = fit_and_eval(pair_scores(pairs, sigs));
        row.accuracy = v.eval_accuracy;
        row.speedup = out.rows.empty()
                          ? 1.0
                          : out.rows.front().per_image_seconds / row.per_image_seconds;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace hwstack
