#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hwstack {

// Grayscale image, row-major intensities in [0,1].
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    Raster() = default;
    Raster(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("zero-area raster");
    }

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    // Bilinear sample at a real-valued position; pixel centers sit on the
    // integer grid. Positions outside [0,w-1]x[0,h-1] return `fill`.
    float sample(double x, double y, float fill) const {
        if (x < 0.0 || y < 0.0 || x > width - 1 || y > height - 1) return fill;
        int x0 = static_cast<int>(std::floor(x));
        int y0 = static_cast<int>(std::floor(y));
        if (x0 > width - 2) x0 = width - 2;
        if (y0 > height - 2) y0 = height - 2;
        if (x0 < 0) x0 = 0;  // width==1
        if (y0 < 0) y0 = 0;
        const double fx = x - x0;
        const double fy = y - y0;
        const double v00 = at(x0, y0);
        const double v10 = (x0 + 1 < width) ? at(x0 + 1, y0) : v00;
        const double v01 = (y0 + 1 < height) ? at(x0, y0 + 1) : v00;
        const double v11 = (x0 + 1 < width && y0 + 1 < height) ? at(x0 + 1, y0 + 1) : v00;
        return static_cast<float>((1 - fy) * ((1 - fx) * v00 + fx * v10) +
                                  fy * ((1 - fx) * v01 + fx * v11));
    }

    Raster crop(int x, int y, int w, int h) const {
        if (x < 0 || y < 0 || w <= 0 || h <= 0 || x + w > width || y + h > height)
            throw std::invalid_argument("crop outside raster");
        Raster out(w, h);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) out.at(c, r) = at(x + c, y + r);
        return out;
    }
};

// Copy src into dst with src's top-left corner at (x, y); must fit.
inline void paste(Raster& dst, const Raster& src, int x, int y) {
    if (x < 0 || y < 0 || x + src.width > dst.width || y + src.height > dst.height)
        throw std::invalid_argument("paste outside raster");
    for (int r = 0; r < src.height; ++r)
        for (int c = 0; c < src.width; ++c) dst.at(x + c, y + r) = src.at(c, r);
}

namespace detail {

inline int pgm_next_token(std::istream& is, std::string& tok) {
    tok.clear();
    int c = is.get();
    while (c != EOF) {
        if (c == '#') {  // comment to end of line
            while (c != EOF && c != '\n') c = is.get();
        } else if (std::isspace(c)) {
            if (!tok.empty()) return 0;
        } else {
            tok.push_back(static_cast<char>(c));
        }
        c = is.get();
    }
    return tok.empty() ? -1 : 0;
}

inline long pgm_int_token(std::istream& is) {
    std::string tok;
    if (pgm_next_token(is, tok) != 0) throw std::runtime_error("truncated PGM header");
    for (char ch : tok)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw std::runtime_error("malformed PGM header token: " + tok);
    return std::stol(tok);
}

}  // namespace detail

// PGM reader: P2 (ASCII) and P5 (binary), maxval up to 65535.
// Color formats are not PGM; conversion by the 0.299/0.587/0.114 luma
// weights applies to the optional decoders layered above this one.
inline Raster load_pgm(std::istream& is) {
    std::string magic;
    if (detail::pgm_next_token(is, magic) != 0) throw std::runtime_error("empty file");
    if (magic != "P2" && magic != "P5") throw std::runtime_error("unsupported format: " + magic);
    const long w = detail::pgm_int_token(is);
    const long h = detail::pgm_int_token(is);
    const long maxval = detail::pgm_int_token(is);
    if (w <= 0 || h <= 0) throw std::runtime_error("zero-area image");
    if (maxval <= 0 || maxval > 65535) throw std::runtime_error("bad PGM maxval");

    Raster out(static_cast<int>(w), static_cast<int>(h));
    const float scale = 1.0f / static_cast<float>(maxval);
    if (magic == "P2") {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const long v = detail::pgm_int_token(is);
            if (v < 0 || v > maxval) throw std::runtime_error("PGM sample out of range");
            out.data[i] = static_cast<float>(v) * scale;
        }
    } else {
        // single whitespace byte after maxval already consumed by tokenizer
        const bool wide = maxval > 255;
        const std::size_t n = out.size() * (wide ? 2 : 1);
        std::vector<unsigned char> buf(n);
        is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is.gcount()) != n) throw std::runtime_error("truncated PGM data");
        for (std::size_t i = 0; i < out.size(); ++i) {
            const unsigned v = wide ? (static_cast<unsigned>(buf[2 * i]) << 8) | buf[2 * i + 1]
                                    : buf[i];
            if (v > static_cast<unsigned>(maxval)) throw std::runtime_error("PGM sample out of range");
            out.data[i] = static_cast<float>(v) * scale;
        }
    }
    return out;
}

inline Raster load_raster(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("unreadable file: " + path);
    try {
        return load_pgm(is);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void save_pgm(const Raster& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> buf(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        float v = img.data[i];
        v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
        buf[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!os) throw std::runtime_error("short write: " + path);
}

}  // namespace hwstack
