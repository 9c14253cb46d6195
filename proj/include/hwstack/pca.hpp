#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "hwstack/common.hpp"
#include "hwstack/windows.hpp"

namespace hwstack {

// Truncated PCA of a template matrix: column mean plus the top-k right
// singular directions of the centered rows. The number of kept directions
// is min(k, numerical rank), so a degenerate input reports a smaller (or
// zero) rank instead of fabricating directions. Sign convention: the
// largest-magnitude component of each basis vector is positive.
struct ProjectionBasis {
    std::size_t dim = 0;
    std::vector<double> mean;             // dim
    std::vector<double> basis;            // k rows of dim, row-major, orthonormal
    std::vector<double> singular_values;  // k, non-increasing
    double mean_sq = 0.0;                 // |mean|^2, cached for scoring

    std::size_t k() const { return singular_values.size(); }
    const double* row(std::size_t i) const { return basis.data() + i * dim; }
};

// Projected vector plus the originals' scalars needed to reconstruct dot
// products: the original-space L2 norm and <mean, v>.
struct ProjectedVec {
    std::vector<double> coeffs;
    double norm = 0.0;
    double mean_dot = 0.0;
};

inline ProjectionBasis fit_pca(const TemplateMatrix& templates, std::size_t k) {
    const std::size_t n = templates.n, dim = templates.dim;
    if (n < 2) throw std::invalid_argument("PCA needs at least 2 templates");
    if (k < 1 || k > std::min(n, dim)) throw std::invalid_argument("PCA rank out of range");

    ProjectionBasis out;
    out.dim = dim;
    out.mean.assign(dim, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const float* r = templates.row(j);
        for (std::size_t i = 0; i < dim; ++i) out.mean[i] += r[i];
    }
    for (double& m : out.mean) m /= static_cast<double>(n);
    out.mean_sq = 0.0;
    for (double m : out.mean) out.mean_sq += m * m;

    Eigen::MatrixXd X(n, dim);
    for (std::size_t j = 0; j < n; ++j) {
        const float* r = templates.row(j);
        for (std::size_t i = 0; i < dim; ++i) X(j, i) = r[i] - out.mean[i];
    }

    // eigendecompose the smaller Gram side
    Eigen::VectorXd evals;
    Eigen::MatrixXd right;  // columns are right singular directions
    if (n <= dim) {
        Eigen::MatrixXd G = X * X.transpose();  // n x n
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
        if (es.info() != Eigen::Success) throw std::runtime_error("PCA eigensolver failed");
        evals = es.eigenvalues();  // ascending
        right.resize(dim, n);
        for (std::size_t i = 0; i < n; ++i) right.col(i) = X.transpose() * es.eigenvectors().col(i);
    } else {
        Eigen::MatrixXd C = X.transpose() * X;  // dim x dim
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        if (es.info() != Eigen::Success) throw std::runtime_error("PCA eigensolver failed");
        evals = es.eigenvalues();
        right = es.eigenvectors();
    }

    const std::size_t n_eval = static_cast<std::size_t>(evals.size());
    const double max_eval = n_eval ? std::max(0.0, evals(n_eval - 1)) : 0.0;
    const double tol = max_eval * 1e-12;

    for (std::size_t t = 0; t < std::min(k, n_eval); ++t) {
        const std::size_t i = n_eval - 1 - t;  // descending
        const double ev = evals(i);
        if (ev <= tol || ev <= 0.0) break;  // numerical rank reached
        Eigen::VectorXd v = right.col(i);
        const double vn = v.norm();
        if (vn == 0.0) break;
        v /= vn;
        // deterministic sign: largest-|component| entry positive
        std::size_t arg = 0;
        for (std::size_t c = 1; c < dim; ++c)
            if (std::abs(v(c)) > std::abs(v(arg))) arg = c;
        if (v(arg) < 0.0) v = -v;

        out.singular_values.push_back(std::sqrt(ev));
        const std::size_t base = out.basis.size();
        out.basis.resize(base + dim);
        for (std::size_t c = 0; c < dim; ++c) out.basis[base + c] = v(c);
    }
    return out;
}

// basis^T (v - mean), plus the scalars approx_ndot needs.
inline ProjectedVec project(std::span<const float> v, const ProjectionBasis& basis) {
    if (v.size() != basis.dim) throw std::invalid_argument("projection dimension mismatch");
    ProjectedVec out;
    out.coeffs.resize(basis.k());
    double nn = 0.0, md = 0.0;
    for (std::size_t i = 0; i < basis.dim; ++i) {
        const double x = v[i];
        nn += x * x;
        md += basis.mean[i] * x;
    }
    out.norm = std::sqrt(nn);
    out.mean_dot = md;
    for (std::size_t r = 0; r < basis.k(); ++r) {
        const double* b = basis.row(r);
        double s = 0.0;
        for (std::size_t i = 0; i < basis.dim; ++i) s += b[i] * (v[i] - basis.mean[i]);
        out.coeffs[r] = s;
    }
    return out;
}

// Approximate cosine from projected coordinates. Exact when both vectors
// lie in span(basis)+mean; the identity used is
//   <u,v> = <pu,pv> + <mean,u> + <mean,v> - |mean|^2.
inline double approx_ndot(const ProjectedVec& a, const ProjectedVec& b, double mean_sq) {
    if (a.coeffs.size() != b.coeffs.size()) throw std::invalid_argument("projected dim mismatch");
    if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) s += a.coeffs[i] * b.coeffs[i];
    return (s + a.mean_dot + b.mean_dot - mean_sq) / (a.norm * b.norm);
}

inline double approx_ndot(const ProjectedVec& a, const ProjectedVec& b,
                          const ProjectionBasis& basis) {
    return approx_ndot(a, b, basis.mean_sq);
}

// header (dim, k) + mean + packed basis rows + singular values, all
// little-endian 64-bit floats.
inline void write_basis(std::ostream& os, const ProjectionBasis& b) {
    put_u32(os, static_cast<std::uint32_t>(b.dim));
    put_u32(os, static_cast<std::uint32_t>(b.k()));
    for (double m : b.mean) put_f64(os, m);
    for (double v : b.basis) put_f64(os, v);
    for (double s : b.singular_values) put_f64(os, s);
}

inline ProjectionBasis read_basis(std::istream& is) {
    ProjectionBasis b;
    b.dim = get_u32(is);
    const std::uint32_t k = get_u32(is);
    b.mean.resize(b.dim);
    for (double& m : b.mean) m = get_f64(is);
    b.basis.resize(static_cast<std::size_t>(k) * b.dim);
    for (double& v : b.basis) v = get_f64(is);
    b.singular_values.resize(k);
    for (double& s : b.singular_values) s = get_f64(is);
    b.mean_sq = 0.0;
    for (double m : b.mean) b.mean_sq += m * m;
    return b;
}

}  // namespace hwstack
