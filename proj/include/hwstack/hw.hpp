#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hwstack/jitter.hpp"
#include "hwstack/raster.hpp"

namespace hwstack {

enum class PoolKind { MAX, MEAN };

inline const char* pool_name(PoolKind p) { return p == PoolKind::MAX ? "max" : "mean"; }

inline PoolKind pool_from_name(const std::string& s) {
    if (s == "max") return PoolKind::MAX;
    if (s == "mean") return PoolKind::MEAN;
    throw std::invalid_argument("unknown pool kind: " + s);
}

// Plain dot product, fixed sequential summation order.
inline double dot(std::span<const float> u, std::span<const float> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += static_cast<double>(u[i]) * v[i];
    return s;
}

// Normalized dot product <u,v>/(|u||v|); zero if either norm is zero.
inline double ndot(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size()) throw std::invalid_argument("ndot dimension mismatch");
    double s = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = u[i], b = v[i];
        if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("non-finite input");
        s += a * b;
        nu += a * a;
        nv += b * b;
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return s / (std::sqrt(nu) * std::sqrt(nv));
}

inline double ndot(const std::vector<float>& u, const std::vector<float>& v) {
    return ndot(std::span<const float>(u), std::span<const float>(v));
}

inline double dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

inline double ndot(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("ndot dimension mismatch");
    double s = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = u[i], b = v[i];
        if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("non-finite input");
        s += a * b;
        nu += a * a;
        nv += b * b;
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return s / (std::sqrt(nu) * std::sqrt(nv));
}

inline double ndot(const std::vector<double>& u, const std::vector<double>& v) {
    return ndot(std::span<const double>(u), std::span<const double>(v));
}

// Pooling stage of an HW-module: max or mean over the member scores.
inline double hw_response(std::span<const double> win_scores, PoolKind pool) {
    if (win_scores.empty()) throw std::invalid_argument("hw_response on empty scores");
    if (pool == PoolKind::MAX) {
        double m = win_scores[0];
        for (double s : win_scores) m = s > m ? s : m;
        return m;
    }
    double sum = 0.0;
    for (double s : win_scores) sum += s;
    return sum / static_cast<double>(win_scores.size());
}

inline double hw_response(const std::vector<double>& s, PoolKind pool) {
    return hw_response(std::span<const double>(s), pool);
}

// Compares <gI,t> against <I,g^-1 t> on raw pixels, where g is a cyclic
// (toroidal) shift. Cyclic shifts act unitarily on pixel space, so the two
// normalized dot products agree to rounding; the pair is returned so
// harnesses can report the gap for non-unitary variants too.
struct TransferCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};

inline TransferCheck check_transfer_condition(const Raster& img, const Raster& tmpl, int dx,
                                              int dy) {
    if (img.width != tmpl.width || img.height != tmpl.height)
        throw std::invalid_argument("transfer check dimension mismatch");
    const Raster shifted_img = cyclic_shift(img, dx, dy);
    const Raster unshifted_tmpl = cyclic_shift(tmpl, -dx, -dy);
    TransferCheck out;
    out.lhs = ndot(shifted_img.data, tmpl.data);
    out.rhs = ndot(img.data, unshifted_tmpl.data);
    return out;
}

// Same comparison with a cropping (non-cyclic) shift: content is moved with
// a fill value and clipped at the frame, which is not unitary, so the two
// sides generally differ.
inline TransferCheck check_transfer_condition_cropping(const Raster& img, const Raster& tmpl,
                                                       int dx, int dy, float fill = 0.0f) {
    if (img.width != tmpl.width || img.height != tmpl.height)
        throw std::invalid_argument("transfer check dimension mismatch");
    JitterParams fwd{static_cast<double>(dx), static_cast<double>(dy), 1.0, 0.0};
    JitterParams bwd{static_cast<double>(-dx), static_cast<double>(-dy), 1.0, 0.0};
    TransferCheck out;
    out.lhs = ndot(affine_jitter(img, fwd, fill).data, tmpl.data);
    out.rhs = ndot(img.data, affine_jitter(tmpl, bwd, fill).data);
    return out;
}

}  // namespace hwstack
