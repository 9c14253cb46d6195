#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hwstack/config.hpp"
#include "hwstack/engine.hpp"
#include "hwstack/templatebook.hpp"

namespace hwstack {

// Trained-system directory: templates, layer-3 groups, per-part projection
// basis and hash index, the full config, and a manifest with content
// fingerprints. The manifest carries no timestamps, so retraining with the
// same inputs and seed reproduces it byte for byte.

namespace detail {

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

template <class Fn>
void write_binary_file(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    fn(os);
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

inline std::ifstream open_binary_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return is;
}

}  // namespace detail

inline void save_bundle(const std::string& dir, const Engine& engine, const Layer3Set& layer3,
                        RunConfig run_cfg) {
    namespace fs = std::filesystem;
    run_cfg.engine = engine.config();  // the stored config always matches the engine
    run_cfg.bundle_dir = dir;
    fs::create_directories(dir);
    const fs::path root(dir);

    std::vector<std::string> files;
    save_config((root / "config.txt").string(), run_cfg);
    files.push_back("config.txt");

    detail::write_binary_file(root / "book.bin",
                              [&](std::ostream& os) { write_book(os, engine.book()); });
    files.push_back("book.bin");
    detail::write_binary_file(root / "layer3.bin",
                              [&](std::ostream& os) { write_layer3(os, layer3); });
    files.push_back("layer3.bin");

    for (std::size_t pi = 0; pi < engine.parts().size(); ++pi) {
        const Engine::Part& part = engine.parts()[pi];
        if (part.projected) {
            const std::string name = "basis_" + std::to_string(pi) + ".bin";
            detail::write_binary_file(root / name,
                                      [&](std::ostream& os) { write_basis(os, part.basis); });
            files.push_back(name);
        }
        if (part.hashing) {
            const std::string name = "index_" + std::to_string(pi) + ".bin";
            detail::write_binary_file(
                root / name, [&](std::ostream& os) { write_index(os, part.index, part.fam); });
            files.push_back(name);
        }
    }

    nlohmann::json manifest;
    manifest["format"] = "hwstack-bundle-1";
    manifest["config"] = serialize_config(run_cfg);
    manifest["counts"] = {{"template_images", engine.book().n_images()},
                          {"rotations", engine.book().n_rotations()},
                          {"layer2_templates", engine.book().count()},
                          {"descriptor_parts", engine.book().parts.size()},
                          {"identity_groups", layer3.groups.size()}};
    nlohmann::json hashes;
    for (const std::string& f : files)
        hashes[f] = detail::hex64(fnv1a64_file((root / f).string()));
    manifest["files"] = hashes;

    std::ofstream os(root / "manifest.json", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write bundle manifest");
    os << manifest.dump(2) << '\n';
}

struct LoadedBundle {
    RunConfig config;
    TemplateBook book;
    Layer3Set layer3;
    std::vector<Engine::Part> parts;

    Engine make_engine() && {
        return Engine(std::move(book), config.engine, std::move(parts));
    }
};

inline LoadedBundle load_bundle(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    if (!fs::exists(root / "manifest.json"))
        throw std::runtime_error("not a bundle directory: " + dir);

    nlohmann::json manifest;
    {
        auto is = detail::open_binary_file(root / "manifest.json");
        is >> manifest;
    }
    if (manifest.value("format", "") != std::string("hwstack-bundle-1"))
        throw std::runtime_error("unsupported bundle format");
    for (const auto& [name, hash] : manifest.at("files").items()) {
        const std::string actual = detail::hex64(fnv1a64_file((root / name).string()));
        if (actual != hash.get<std::string>())
            throw std::runtime_error("bundle file corrupted: " + name);
    }

    LoadedBundle out;
    out.config = load_config((root / "config.txt").string());
    {
        auto is = detail::open_binary_file(root / "book.bin");
        out.book = read_book(is);
    }
    {
        auto is = detail::open_binary_file(root / "layer3.bin");
        out.layer3 = read_layer3(is);
    }
    for (std::size_t pi = 0; pi < out.book.parts.size(); ++pi) {
        Engine::Part part;
        part.book_part = pi;
        part.projected = out.config.engine.pca_k > 0;
        if (part.projected) {
            auto is = detail::open_binary_file(root / ("basis_" + std::to_string(pi) + ".bin"));
            part.basis = read_basis(is);
        }
        part.hashing = out.config.engine.use_coc;
        if (part.hashing) {
            auto is = detail::open_binary_file(root / ("index_" + std::to_string(pi) + ".bin"));
            LoadedIndex li = read_index(is);
            part.fam = std::move(li.fam);
            part.index = std::move(li.index);
        }
        out.parts.push_back(std::move(part));
    }
    return out;
}

}  // namespace hwstack
