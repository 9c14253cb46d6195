#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hwstack/bench.hpp"
#include "hwstack/bundle.hpp"
#include "hwstack/config.hpp"
#include "hwstack/dataio.hpp"
#include "hwstack/engine.hpp"
#include "hwstack/metrics.hpp"
#include "hwstack/synth.hpp"

namespace fs = std::filesystem;
using namespace hwstack;

namespace {

// Relative paths inside a manifest resolve against the manifest's directory.
std::string resolve_rel(const std::string& base_file, const std::string& p) {
    fs::path q(p);
    if (q.is_absolute()) return p;
    return (fs::path(base_file).parent_path() / q).string();
}

std::vector<std::pair<Raster, std::string>> load_manifest_images(const std::string& manifest) {
    std::vector<std::pair<Raster, std::string>> out;
    for (const ManifestEntry& e : load_manifest(manifest))
        out.emplace_back(load_raster(resolve_rel(manifest, e.path)), e.identity);
    return out;
}

struct ConfigArgs {
    std::string config_path;
    std::vector<std::string> sets;
    unsigned threads = 0;
    bool threads_given = false;
};

void add_config_options(CLI::App* cmd, ConfigArgs& a) {
    cmd->add_option("--config", a.config_path, "config file (key = value lines)");
    cmd->add_option("--set", a.sets, "override a config key, e.g. --set consensus=250")
        ->type_name("KEY=VALUE");
    cmd->add_option("--threads", a.threads, "worker threads (0 = hardware)")
        ->each([&a](const std::string&) { a.threads_given = true; });
}

RunConfig resolve_config(const ConfigArgs& a, RunConfig cfg = {}) {
    if (!a.config_path.empty()) cfg = load_config(a.config_path);
    for (const std::string& kv : a.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected KEY=VALUE, got: " + kv);
        apply_config_entry(cfg, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
    }
    if (a.threads_given) cfg.engine.threads = a.threads;
    cfg.engine.validate();
    return cfg;
}

void emit_report(const BenchReport& r, const std::string& out_dir, const std::string& stem) {
    fs::create_directories(out_dir);
    {
        std::ofstream os(fs::path(out_dir) / (stem + ".csv"));
        r.write_csv(os);
    }
    {
        std::ofstream os(fs::path(out_dir) / (stem + ".txt"));
        r.write_table(os);
    }
    r.write_table(std::cout);
    std::cout << "wrote " << (fs::path(out_dir) / (stem + ".csv")).string() << "\n";
}

std::vector<double> parse_csv_doubles(const std::string& s) {
    return detail::parse_doubles(s);
}

// ---- train -----------------------------------------------------------------

int cmd_train(const ConfigArgs& ca, const std::string& templates_opt,
              const std::string& layer3_opt, const std::string& out_opt) {
    RunConfig cfg = resolve_config(ca);
    if (!templates_opt.empty()) cfg.template_manifest = templates_opt;
    if (!layer3_opt.empty()) cfg.layer3_manifest = layer3_opt;
    if (!out_opt.empty()) cfg.bundle_dir = out_opt;
    if (cfg.template_manifest.empty())
        throw std::runtime_error("no template manifest (set template_manifest or --templates)");
    if (cfg.bundle_dir.empty()) cfg.bundle_dir = "bundle";

    const Stopwatch sw;
    const auto images = load_manifest_images(cfg.template_manifest);
    const TemplateBook book = train_layer2(images, cfg.engine.rotations, cfg.engine.desc,
                                           cfg.engine.kind, cfg.engine.fill);
    const Engine engine(book, cfg.engine);
    const auto l3_images =
        cfg.layer3_manifest.empty() ? images : load_manifest_images(cfg.layer3_manifest);
    const Layer3Set l3 = engine.train_layer3(l3_images);
    save_bundle(cfg.bundle_dir, engine, l3, cfg);

    std::cout << "template images: " << book.n_images() << "\n"
              << "rotations: " << book.n_rotations() << "\n"
              << "layer-2 templates: " << book.count() << "\n"
              << "descriptor parts: " << book.parts.size() << "\n"
              << "identity groups: " << l3.groups.size() << "\n"
              << "trained in " << fmt_fixed(sw.seconds(), 3) << " s\n"
              << "bundle: " << cfg.bundle_dir << "\n";
    return 0;
}

// ---- signature ---------------------------------------------------------------

int cmd_signature(const std::string& bundle_dir, const std::string& image_path, bool layer2) {
    LoadedBundle lb = load_bundle(bundle_dir);
    const Layer3Set l3 = lb.layer3;
    const Engine engine = std::move(lb).make_engine();
    const Raster img = load_raster(image_path);
    if (layer2) {
        const std::vector<double> sig = engine.layer2_signature(img);
        for (std::size_t i = 0; i < sig.size(); ++i)
            std::cout << i << ',' << fmt_double(sig[i]) << '\n';
    } else {
        const std::vector<double> sig = engine.signature(img, l3);
        for (std::size_t i = 0; i < sig.size(); ++i)
            std::cout << l3.groups[i].identity << ',' << fmt_double(sig[i]) << '\n';
    }
    return 0;
}

// ---- verify ------------------------------------------------------------------

int cmd_verify(const ConfigArgs& ca, const std::string& bundle_dir, const std::string& pairs_path,
               const std::string& scores_path, unsigned folds) {
    LoadedBundle lb = load_bundle(bundle_dir);
    if (ca.threads_given) lb.config.engine.threads = ca.threads;
    const Layer3Set l3 = lb.layer3;
    const Engine engine = std::move(lb).make_engine();

    const std::vector<PairEntry> pairs = load_pairs(pairs_path);
    std::map<std::string, std::vector<double>> cache;
    const auto sig_of = [&](const std::string& p) -> const std::vector<double>& {
        auto it = cache.find(p);
        if (it == cache.end()) {
            const Raster img = load_raster(resolve_rel(pairs_path, p));
            it = cache.emplace(p, engine.signature(img, l3)).first;
        }
        return it->second;
    };

    std::vector<std::pair<double, bool>> scored;
    std::vector<double> scores;
    scored.reserve(pairs.size());
    for (const PairEntry& p : pairs) {
        const double s = ndot(sig_of(p.path_a), sig_of(p.path_b));
        scored.emplace_back(s, p.same);
        scores.push_back(s);
    }

    VerifierModel model{};
    if (folds <= 1) {
        model = fit_threshold(even_half(scored));
        std::cout << "tau = " << fmt_double(model.tau) << "\n"
                  << "train accuracy = " << fmt_fixed(model.train_accuracy, 4) << "\n"
                  << "test accuracy = " << fmt_fixed(accuracy_at(odd_half(scored), model.tau), 4)
                  << "\n";
    } else {
        std::vector<double> fold_acc;
        for (unsigned f = 0; f < folds; ++f) {
            std::vector<std::pair<double, bool>> fit, eval;
            for (std::size_t i = 0; i < scored.size(); ++i)
                (i % folds == f ? eval : fit).push_back(scored[i]);
            const VerifierModel m = fit_threshold(fit);
            fold_acc.push_back(accuracy_at(eval, m.tau));
            std::cout << "fold " << f << ": tau = " << fmt_double(m.tau)
                      << ", accuracy = " << fmt_fixed(fold_acc.back(), 4) << "\n";
        }
        const MeanStdev ms = mean_stdev(fold_acc);
        std::cout << "accuracy = " << fmt_fixed(ms.mean, 4) << " +/- " << fmt_fixed(ms.stdev, 4)
                  << " over " << folds << " folds\n";
        model = fit_threshold(scored);  // full fit for the emitted predictions
        std::cout << "full-fit tau = " << fmt_double(model.tau) << "\n";
    }

    if (!scores_path.empty()) {
        std::vector<bool> predictions;
        predictions.reserve(scores.size());
        for (double s : scores) predictions.push_back(s > model.tau);
        std::ofstream os(scores_path);
        if (!os) throw std::runtime_error("cannot write " + scores_path);
        write_scores_csv(os, pairs, scores, predictions);
        std::cout << "wrote " << scores_path << "\n";
    }
    return 0;
}

// ---- bench -------------------------------------------------------------------

struct BenchCommon {
    std::string out_dir = "bench-out";
    std::uint64_t seed = 1;
    std::size_t ids = 0;
    std::size_t backgrounds = 0;
    std::size_t templates = 0;
};

void add_bench_options(CLI::App* cmd, BenchCommon& bc, std::size_t ids, std::size_t bgs,
                       std::size_t templates) {
    bc.ids = ids;
    bc.backgrounds = bgs;
    bc.templates = templates;
    cmd->add_option("--out", bc.out_dir, "report output directory");
    cmd->add_option("--seed", bc.seed, "master seed");
    cmd->add_option("--ids", bc.ids, "dataset identities");
    cmd->add_option("--backgrounds", bc.backgrounds, "backgrounds per identity");
    cmd->add_option("--templates", bc.templates, "stored templates");
}

int cmd_bench_clutter(const ConfigArgs& ca, const BenchCommon& bc, int canvas, int glyph,
                      const std::string& sizes_csv) {
    RunConfig base;
    base.engine.stride = 8;
    base.engine.seed = bc.seed;
    const RunConfig cfg = resolve_config(ca, base);

    std::vector<int> sizes;
    for (double v : parse_csv_doubles(sizes_csv)) sizes.push_back(static_cast<int>(v));
    const SynthParams sp;
    const ClutterDataset cluttered =
        gen_clutter_dataset(bc.ids, bc.backgrounds, canvas, glyph, bc.seed, sp, true);
    const ClutterDataset clean =
        gen_clutter_dataset(bc.ids, bc.backgrounds, canvas, glyph, bc.seed, sp, false);
    const ClutterSweepResult res =
        clutter_sweep(sizes, cluttered, clean, bc.templates, bc.seed, sp, cfg.engine);
    emit_report(res.report(), bc.out_dir, "clutter");
    return 0;
}

int cmd_bench_consensus(const ConfigArgs& ca, const BenchCommon& bc, int canvas, int glyph,
                        int crop_offset, const std::string& n_csv) {
    RunConfig base;
    base.engine.window = 48;
    base.engine.stride = 8;
    base.engine.ratios = {1.0};
    base.engine.rotations = {0.0};
    base.engine.hash_bits = 14;
    base.engine.hash_tables = 8;
    base.engine.seed = bc.seed;
    const RunConfig cfg = resolve_config(ca, base);

    std::vector<std::size_t> n_values;
    for (double v : parse_csv_doubles(n_csv)) n_values.push_back(static_cast<std::size_t>(v));
    const SynthParams sp;
    const ClutterDataset ds =
        gen_clutter_dataset(bc.ids, bc.backgrounds, canvas, glyph, bc.seed, sp, true);
    const ConsensusSweepResult res =
        consensus_sweep(n_values, ds, bc.templates, crop_offset, bc.seed, sp, cfg.engine);
    emit_report(res.report(), bc.out_dir, "consensus");
    return 0;
}

int cmd_bench_jitter(const ConfigArgs& ca, const BenchCommon& bc, int canvas, int glyph,
                     const JitterRanges& ranges) {
    RunConfig base;
    base.engine.window = 48;
    base.engine.stride = 8;
    base.engine.ratios = geometric_ratios(1.0, 0.65, 6);
    base.engine.rotations = {-12.0, -6.0, 0.0, 6.0, 12.0};
    base.engine.seed = bc.seed;
    const RunConfig cfg = resolve_config(ca, base);

    const SynthParams sp;
    const ClutterDataset ds =
        gen_clutter_dataset(bc.ids, bc.backgrounds, canvas, glyph, bc.seed, sp, true);
    const JitterBenchResult res = jitter_bench(ds, ranges, bc.templates, bc.seed, sp, cfg.engine);
    emit_report(res.report(), bc.out_dir, "jitter");
    return 0;
}

int cmd_bench_speedup(const ConfigArgs& ca, const BenchCommon& bc, int canvas, int glyph,
                      int crop_offset, std::size_t n_eval, std::size_t coc_n, std::size_t k) {
    RunConfig base;
    base.engine.window = 48;
    base.engine.stride = 8;
    base.engine.ratios = {1.0};
    base.engine.rotations = {0.0};
    base.engine.hash_bits = 16;
    base.engine.hash_tables = 8;
    base.engine.seed = bc.seed;
    const RunConfig cfg = resolve_config(ca, base);

    const SynthParams sp;
    const ClutterDataset ds =
        gen_clutter_dataset(bc.ids, bc.backgrounds, canvas, glyph, bc.seed, sp, true);
    const SpeedupBenchResult res = speedup_bench(ds, bc.templates, n_eval, crop_offset, coc_n, k,
                                                 bc.seed, sp, cfg.engine);
    emit_report(res.report(), bc.out_dir, "speedup");
    return 0;
}

// ---- jitter-gen ----------------------------------------------------------------

int cmd_jitter_gen(const std::vector<std::string>& images, const std::string& out_dir,
                   const JitterRanges& ranges, unsigned count, std::uint64_t seed, float fill) {
    ranges.validate();
    if (count < 1) throw std::invalid_argument("count must be positive");
    fs::create_directories(out_dir);
    std::vector<JitterManifestEntry> entries;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const Raster img = load_raster(images[i]);
        const std::string stem = fs::path(images[i]).stem().string();
        for (unsigned c = 0; c < count; ++c) {
            SeededRng rng(derive_seed(seed, i * 1000 + c));
            const JitterParams p = sample_jitter(rng, ranges);
            const std::string dst =
                (fs::path(out_dir) / (stem + "_j" + std::to_string(c) + ".pgm")).string();
            save_pgm(affine_jitter(img, p, fill), dst);
            entries.push_back({images[i], p, dst});
        }
    }
    const std::string manifest = (fs::path(out_dir) / "jitter_manifest.csv").string();
    std::ofstream os(manifest);
    if (!os) throw std::runtime_error("cannot write " + manifest);
    write_jitter_manifest(os, entries);
    std::cout << "wrote " << entries.size() << " images and " << manifest << "\n";
    return 0;
}

// ---- index-inspect ---------------------------------------------------------------

int cmd_index_inspect(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    const LoadedIndex li = read_index(is);
    std::cout << "bits: " << li.fam.bits << "\n"
              << "tables: " << li.fam.tables << "\n"
              << "dim: " << li.fam.dim << "\n"
              << "seed: " << li.fam.seed << "\n"
              << "templates: " << li.index.n_templates << "\n";
    std::size_t buckets = 0, largest = 0;
    std::map<std::size_t, std::size_t> hist;  // bucket size -> bucket count
    for (const auto& table : li.index.tables) {
        buckets += table.size();
        for (const auto& [code, ids] : table) {
            ++hist[ids.size()];
            largest = std::max(largest, ids.size());
        }
    }
    std::cout << "buckets: " << buckets << "\n"
              << "largest bucket: " << largest << "\n"
              << "bucket_size,count\n";
    for (const auto& [size, n] : hist) std::cout << size << ',' << n << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"layered template-matching verification stack"};
    app.require_subcommand(1);
    int rc = 0;

    // train
    ConfigArgs train_ca;
    std::string train_templates, train_layer3, train_out;
    CLI::App* train = app.add_subcommand("train", "train a model and save a bundle");
    add_config_options(train, train_ca);
    train->add_option("--templates", train_templates, "template manifest CSV (path,identity)");
    train->add_option("--layer3", train_layer3, "identity-pooling manifest CSV (path,identity)");
    train->add_option("--out", train_out, "bundle output directory");
    train->callback([&] { rc = cmd_train(train_ca, train_templates, train_layer3, train_out); });

    // signature
    std::string sig_bundle, sig_image;
    bool sig_layer2 = false;
    CLI::App* sig = app.add_subcommand("signature", "print an image's signature");
    sig->add_option("--bundle", sig_bundle, "trained bundle directory")->required();
    sig->add_option("image", sig_image, "PGM image")->required();
    sig->add_flag("--layer2", sig_layer2, "print the raw pooled-response vector instead");
    sig->callback([&] { rc = cmd_signature(sig_bundle, sig_image, sig_layer2); });

    // verify
    ConfigArgs verify_ca;
    std::string verify_bundle, verify_pairs, verify_scores = "scores.csv";
    unsigned verify_folds = 1;
    CLI::App* verify = app.add_subcommand("verify", "same/different decisions over image pairs");
    verify->add_option("--bundle", verify_bundle, "trained bundle directory")->required();
    verify->add_option("--pairs", verify_pairs, "pair list CSV (pathA,pathB,label)")->required();
    verify->add_option("--scores", verify_scores, "output scores CSV ('' to skip)");
    verify->add_option("--folds", verify_folds, "cross-validation folds (1 = half/half split)");
    verify->add_option("--threads", verify_ca.threads, "worker threads (0 = hardware)")
        ->each([&verify_ca](const std::string&) { verify_ca.threads_given = true; });
    verify->callback([&] {
        rc = cmd_verify(verify_ca, verify_bundle, verify_pairs, verify_scores, verify_folds);
    });

    // bench
    CLI::App* bench = app.add_subcommand("bench", "synthetic benchmarks");
    bench->require_subcommand(1);

    ConfigArgs clutter_ca;
    BenchCommon clutter_bc;
    int clutter_canvas = 96, clutter_glyph = 64;
    std::string clutter_sizes = "16,32,48,64";
    CLI::App* clutter = bench->add_subcommand("clutter", "template-size sweep AUC");
    add_config_options(clutter, clutter_ca);
    add_bench_options(clutter, clutter_bc, 50, 5, 40);
    clutter->add_option("--canvas", clutter_canvas, "scene side length");
    clutter->add_option("--glyph", clutter_glyph, "pattern side length");
    clutter->add_option("--sizes", clutter_sizes, "comma list of template sizes");
    clutter->callback([&] {
        rc = cmd_bench_clutter(clutter_ca, clutter_bc, clutter_canvas, clutter_glyph,
                               clutter_sizes);
    });

    ConfigArgs cons_ca;
    BenchCommon cons_bc;
    int cons_canvas = 120, cons_glyph = 56, cons_off = 8;
    std::string cons_values = "5,10,25,50,100";
    CLI::App* cons = bench->add_subcommand("consensus", "consensus-count sweep");
    add_config_options(cons, cons_ca);
    add_bench_options(cons, cons_bc, 30, 4, 40);
    cons->add_option("--canvas", cons_canvas, "scene side length");
    cons->add_option("--glyph", cons_glyph, "pattern side length");
    cons->add_option("--crop-offset", cons_off, "template crop offset inside the pattern");
    cons->add_option("--values", cons_values, "comma list of consensus sizes");
    cons->callback([&] {
        rc = cmd_bench_consensus(cons_ca, cons_bc, cons_canvas, cons_glyph, cons_off, cons_values);
    });

    ConfigArgs jit_ca;
    BenchCommon jit_bc;
    int jit_canvas = 192, jit_glyph = 56;
    JitterRanges jit_ranges{-20.0, 20.0, -20.0, 20.0, 1.0, 1.5, -20.0, 20.0};
    CLI::App* jit = bench->add_subcommand("jitter", "jitter robustness vs a raw baseline");
    add_config_options(jit, jit_ca);
    add_bench_options(jit, jit_bc, 16, 3, 12);
    jit->add_option("--canvas", jit_canvas, "scene side length");
    jit->add_option("--glyph", jit_glyph, "pattern side length");
    jit->add_option("--dx", [&jit_ranges](const std::vector<std::string>& v) {
           jit_ranges.dx_min = parse_double(v[0]);
           jit_ranges.dx_max = parse_double(v[1]);
           return true;
       },
       "horizontal shift range")->expected(2);
    jit->add_option("--dy", [&jit_ranges](const std::vector<std::string>& v) {
           jit_ranges.dy_min = parse_double(v[0]);
           jit_ranges.dy_max = parse_double(v[1]);
           return true;
       },
       "vertical shift range")->expected(2);
    jit->add_option("--scale", [&jit_ranges](const std::vector<std::string>& v) {
           jit_ranges.scale_min = parse_double(v[0]);
           jit_ranges.scale_max = parse_double(v[1]);
           return true;
       },
       "scale range")->expected(2);
    jit->add_option("--rot", [&jit_ranges](const std::vector<std::string>& v) {
           jit_ranges.rot_min = parse_double(v[0]);
           jit_ranges.rot_max = parse_double(v[1]);
           return true;
       },
       "rotation range, degrees")->expected(2);
    jit->callback(
        [&] { rc = cmd_bench_jitter(jit_ca, jit_bc, jit_canvas, jit_glyph, jit_ranges); });

    ConfigArgs spd_ca;
    BenchCommon spd_bc;
    int spd_canvas = 120, spd_glyph = 56, spd_off = 8;
    std::size_t spd_eval = 10, spd_n = 10, spd_k = 32;
    CLI::App* spd = bench->add_subcommand("speedup", "hashing / projection speedup accounting");
    add_config_options(spd, spd_ca);
    add_bench_options(spd, spd_bc, 10, 1, 12000);
    spd->add_option("--canvas", spd_canvas, "scene side length");
    spd->add_option("--glyph", spd_glyph, "pattern side length");
    spd->add_option("--crop-offset", spd_off, "template crop offset inside the pattern");
    spd->add_option("--eval", spd_eval, "evaluation images");
    spd->add_option("--consensus", spd_n, "consensus size for the pruned rows");
    spd->add_option("--k", spd_k, "projection rank for the projected rows");
    spd->callback([&] {
        rc = cmd_bench_speedup(spd_ca, spd_bc, spd_canvas, spd_glyph, spd_off, spd_eval, spd_n,
                               spd_k);
    });

    // jitter-gen
    std::vector<std::string> jg_images;
    std::string jg_out = "jittered";
    JitterRanges jg_ranges;
    unsigned jg_count = 1;
    std::uint64_t jg_seed = 1;
    float jg_fill = 0.5f;
    CLI::App* jg = app.add_subcommand("jitter-gen", "write jittered copies plus a manifest");
    jg->add_option("images", jg_images, "input PGM images")->required();
    jg->add_option("--out", jg_out, "output directory");
    jg->add_option("--count", jg_count, "copies per image");
    jg->add_option("--seed", jg_seed, "master seed");
    jg->add_option("--fill", jg_fill, "out-of-frame fill value");
    jg->add_option("--dx", [&jg_ranges](const std::vector<std::string>& v) {
           jg_ranges.dx_min = parse_double(v[0]);
           jg_ranges.dx_max = parse_double(v[1]);
           return true;
       },
       "horizontal shift range")->expected(2);
    jg->add_option("--dy", [&jg_ranges](const std::vector<std::string>& v) {
           jg_ranges.dy_min = parse_double(v[0]);
           jg_ranges.dy_max = parse_double(v[1]);
           return true;
       },
       "vertical shift range")->expected(2);
    jg->add_option("--scale", [&jg_ranges](const std::vector<std::string>& v) {
           jg_ranges.scale_min = parse_double(v[0]);
           jg_ranges.scale_max = parse_double(v[1]);
           return true;
       },
       "scale range")->expected(2);
    jg->add_option("--rot", [&jg_ranges](const std::vector<std::string>& v) {
           jg_ranges.rot_min = parse_double(v[0]);
           jg_ranges.rot_max = parse_double(v[1]);
           return true;
       },
       "rotation range, degrees")->expected(2);
    jg->callback([&] { rc = cmd_jitter_gen(jg_images, jg_out, jg_ranges, jg_count, jg_seed, jg_fill); });

    // index-inspect
    std::string ii_path;
    CLI::App* ii = app.add_subcommand("index-inspect", "print a hash index's bucket profile");
    ii->add_option("index", ii_path, "index file")->required();
    ii->callback([&] { rc = cmd_index_inspect(ii_path); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
