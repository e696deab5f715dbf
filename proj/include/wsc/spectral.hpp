#pragma once

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wsc/common.hpp"
#include "wsc/graph.hpp"
#include "wsc/json_io.hpp"

namespace wsc {

/// Eigenvalues sorted descending with orthonormal, sign-canonicalized
/// eigenvector columns. Deterministic: identical inputs produce bit-identical
/// output across runs.
struct Spectrum {
    Vec eigenvalues;   // length n, descending
    Mat eigenvectors;  // n x n, column i pairs with eigenvalues[i]
};

namespace detail {

// first component with |entry| > 1e-12 is made positive
inline void canonicalize_sign(Mat& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
            if (std::abs(vectors(i, j)) > 1e-12) {
                if (vectors(i, j) < 0.0) vectors.col(j) = -vectors.col(j);
                break;
            }
        }
    }
}

}  // namespace detail

// Cyclic Jacobi rotations on the dense symmetric matrix. Stops when the
// off-diagonal Frobenius mass falls below 1e-12 relative to the input scale.
inline Spectrum eigendecompose_symmetric(const Mat& input) {
    const int n = static_cast<int>(input.rows());
    require(input.cols() == n, "eigendecompose: input must be square");
    require((input - input.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
            "eigendecompose: input is not symmetric");

    Mat a = 0.5 * (input + input.transpose());
    Mat v = Mat::Identity(n, n);
    const double scale = std::max(1.0, a.norm());

    auto off_mass = [&]() {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < 100 && off_mass() > 1e-12 * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                // stable tangent of the rotation angle
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cs = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * cs;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = cs * akp - sn * akq;
                    a(k, q) = sn * akp + cs * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = cs * apk - sn * aqk;
                    a(q, k) = sn * apk + cs * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = cs * vkp - sn * vkq;
                    v(k, q) = sn * vkp + cs * vkq;
                }
            }
        }
    }

    detail::canonicalize_sign(v);

    // descending eigenvalue order; exact ties broken by lexicographic
    // comparison of the canonicalized eigenvectors
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
        if (a(lhs, lhs) != a(rhs, rhs)) return a(lhs, lhs) > a(rhs, rhs);
        for (int k = 0; k < n; ++k) {
            if (v(k, lhs) != v(k, rhs)) return v(k, lhs) < v(k, rhs);
        }
        return false;
    });

    Spectrum s;
    s.eigenvalues.resize(n);
    s.eigenvectors.resize(n, n);
    for (int i = 0; i < n; ++i) {
        s.eigenvalues[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        s.eigenvectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    return s;
}

inline Spectrum eigendecompose(const NormalizedGraph& ng) { return eigendecompose_symmetric(ng.matrix); }

// Top-d columns sqrt(max(lambda_i, 0)) * v_i. Negative directions cannot be
// represented by F F^T and are truncated at zero.
inline Mat optimal_embedding(const Spectrum& spec, int d) {
    const int n = static_cast<int>(spec.eigenvalues.size());
    require(d >= 1 && d <= n, "optimal_embedding: d must be in [1, n]");
    Mat f(n, d);
    for (int i = 0; i < d; ++i)
        f.col(i) = std::sqrt(std::max(spec.eigenvalues[i], 0.0)) * spec.eigenvectors.col(i);
    return f;
}

inline Mat embedding_to_features(const Mat& embedding, const Vec& degrees) {
    require(embedding.rows() == degrees.size(), "embedding_to_features: dimension mismatch");
    for (Eigen::Index i = 0; i < degrees.size(); ++i)
        if (!(degrees[i] > 0.0))
            throw NumericError("embedding_to_features: zero degree at vertex " + std::to_string(i));
    return degrees.cwiseSqrt().cwiseInverse().asDiagonal() * embedding;
}

inline Mat features_to_embedding(const Mat& features, const Vec& degrees) {
    require(features.rows() == degrees.size(), "features_to_embedding: dimension mismatch");
    return degrees.cwiseSqrt().asDiagonal() * features;
}

// Eigenvalue gap lambda_{floor(3d/4)} - lambda_d (1-indexed, descending).
inline double eigengap(const Spectrum& spec, int d) {
    const int n = static_cast<int>(spec.eigenvalues.size());
    const int upper = (3 * d) / 4;
    require(d >= 1 && d <= n && upper >= 1,
            "eigengap: need 1 <= floor(3d/4) and d <= n (got d=" + std::to_string(d) + ")");
    return spec.eigenvalues[upper - 1] - spec.eigenvalues[d - 1];
}

// PSD-constrained optimum of || A~ - F F^T ||_F^2 at rank d:
// ||A~||_F^2 - sum of the top-d positive eigenvalues squared.
inline double psd_truncation_optimum(const Spectrum& spec, const NormalizedGraph& ng, int d) {
    double value = ng.matrix.squaredNorm();
    for (int i = 0; i < d && i < static_cast<int>(spec.eigenvalues.size()); ++i)
        if (spec.eigenvalues[i] > 0.0) value -= spec.eigenvalues[i] * spec.eigenvalues[i];
    return value;
}

// Frobenius distance between the orthogonal projectors onto the column spans
// of the degree-scaled embeddings. Rank-deficient inputs are flagged and the
// distance is computed on the actual spans.
inline double subspace_distance(const Mat& f1, const Mat& f2, const Vec& degrees) {
    require(f1.rows() == f2.rows() && f1.rows() == degrees.size(),
            "subspace_distance: dimension mismatch");
    auto projector = [&](const Mat& f, const char* name) {
        const Mat emb = features_to_embedding(f, degrees);
        Eigen::ColPivHouseholderQR<Mat> qr(emb);
        qr.setThreshold(1e-10);
        const Eigen::Index rank = qr.rank();
        if (rank < emb.cols())
            log_warn(std::string("subspace_distance: ") + name + " is rank-deficient (rank " +
                     std::to_string(rank) + " of " + std::to_string(emb.cols()) + ")");
        const Mat q = qr.householderQ() * Mat::Identity(emb.rows(), rank);
        return (q * q.transpose()).eval();
    };
    return (projector(f1, "first input") - projector(f2, "second input")).norm();
}

inline std::string spectrum_to_json(const Spectrum& s, bool include_vectors = false) {
    JsonWriter out;
    out.begin_object();
    out.field("n", static_cast<int>(s.eigenvalues.size()));
    out.field("eigenvalues", s.eigenvalues);
    if (include_vectors) out.field("eigenvectors", s.eigenvectors);
    out.end_object();
    return out.str();
}

}  // namespace wsc
