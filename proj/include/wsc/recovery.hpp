#pragma once

#include <Eigen/SVD>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "wsc/common.hpp"
#include "wsc/json_io.hpp"
#include "wsc/world.hpp"

namespace wsc {

enum class RecoveryMode { shared, per_instance };
enum class RecoveryProvenance { exact, inverse_transition, scui, posterior, custom };

inline const char* to_string(RecoveryMode m) {
    return m == RecoveryMode::shared ? "shared" : "per_instance";
}
inline const char* to_string(RecoveryProvenance p) {
    switch (p) {
        case RecoveryProvenance::exact: return "exact";
        case RecoveryProvenance::inverse_transition: return "inverse_transition";
        case RecoveryProvenance::scui: return "scui";
        case RecoveryProvenance::posterior: return "posterior";
        default: return "custom";
    }
}

/// Per-instance (or shared) c x v matrices mapping the weak posterior
/// P(q|x~) to the class posterior P(y|x~). Immutable after construction.
struct RecoveryMap {
    RecoveryMode mode = RecoveryMode::shared;
    RecoveryProvenance provenance = RecoveryProvenance::custom;
    int c = 0;
    int v = 0;
    std::vector<Mat> matrices;  // one (shared) or m (per instance)

    // posterior_recovery columns that had zero normalizer and were filled
    // with the uniform distribution: (instance, weak_index)
    std::vector<std::pair<int, int>> uniform_filled;

    const Mat& at(int instance) const {
        return mode == RecoveryMode::shared ? matrices[0]
                                            : matrices[static_cast<std::size_t>(instance)];
    }

    void validate() const {
        require(!matrices.empty(), "RecoveryMap: no matrices");
        for (std::size_t i = 0; i < matrices.size(); ++i) {
            require(matrices[i].rows() == c && matrices[i].cols() == v,
                    "RecoveryMap: matrix " + std::to_string(i) + " is not c x v");
            require(matrices[i].allFinite(),
                    "RecoveryMap: matrix " + std::to_string(i) + " has non-finite entries");
        }
    }
};

// Rank-one minimum-Frobenius-norm solution of S(x~) P(q|x~) = P(y|x~).
// The constraint is underdetermined; this choice is deterministic and exists
// whenever P(q|x~) != 0.
inline RecoveryMap exact_recovery(const WeakWorld& ww) {
    RecoveryMap s;
    s.mode = RecoveryMode::per_instance;
    s.provenance = RecoveryProvenance::exact;
    s.c = ww.world.c;
    s.v = ww.v;
    s.matrices.reserve(static_cast<std::size_t>(ww.world.m));
    for (int i = 0; i < ww.world.m; ++i) {
        const Vec q = ww.weak_posterior.row(i).transpose();
        const double norm2 = q.squaredNorm();
        if (norm2 <= 0.0)
            throw NumericError("exact_recovery: P(q|x~) is zero for instance " + std::to_string(i));
        s.matrices.push_back((ww.world.class_posterior.row(i).transpose() * q.transpose()) / norm2);
    }
    s.validate();
    return s;
}

// Shared S with S * T_hat = I: plain inverse when v == c, left pseudo-inverse
// otherwise. Singular values below 1e-12 * sigma_max are treated as zero.
inline RecoveryMap inverse_transition_recovery(const TransitionMatrix& t_hat) {
    Eigen::JacobiSVD<Mat> svd(t_hat.probs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    const double smin = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
    if (smin <= smax * 1e-12 || (smax > 0.0 && smax / smin > 1e12))
        throw NumericError("inverse_transition_recovery: T_hat is rank-deficient (smallest "
                           "singular value " + JsonWriter::format_double(smin) + ")");

    RecoveryMap s;
    s.mode = RecoveryMode::shared;
    s.provenance = RecoveryProvenance::inverse_transition;
    s.c = t_hat.c;
    s.v = t_hat.v;
    Mat pinv = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    s.matrices.push_back(std::move(pinv));
    s.validate();
    return s;
}

// Closed-form S * T = I for the candidate-set transition: 1 on candidate
// entries, -sigma_y/(1-sigma_y) elsewhere.
inline RecoveryMap scui_recovery(const ScuiParams& params, int c) {
    require(params.sigma.size() == c, "scui_recovery: sigma must have length c");
    for (int y = 0; y < c; ++y)
        require(params.sigma[y] >= 0.0 && params.sigma[y] < 1.0,
                "scui_recovery: sigma[" + std::to_string(y) + "] must be in [0, 1)");
    const int v = (1 << c) - 1;
    RecoveryMap s;
    s.mode = RecoveryMode::shared;
    s.provenance = RecoveryProvenance::scui;
    s.c = c;
    s.v = v;
    Mat m(c, v);
    for (int mask = 1; mask <= v; ++mask)
        for (int y = 0; y < c; ++y)
            m(y, scui_index_of_mask(mask)) =
                (mask & (1 << y)) ? 1.0 : -params.sigma[y] / (1.0 - params.sigma[y]);
    s.matrices.push_back(std::move(m));
    s.validate();
    return s;
}

enum class SigmaThetaDirection { sigma_to_theta, theta_to_sigma };

// Mixture-proportion parameterization: theta = (c-1) sigma / (1 + (c-1) sigma).
inline double sigma_theta_convert(double value, int c, SigmaThetaDirection direction) {
    require(c >= 2, "sigma_theta_convert: c must be >= 2");
    require(value >= 0.0 && value < 1.0, "sigma_theta_convert: value must be in [0, 1)");
    const double k = static_cast<double>(c - 1);
    if (direction == SigmaThetaDirection::sigma_to_theta) return k * value / (1.0 + k * value);
    return value / (k * (1.0 - value));
}

enum class PosteriorSetting { nll, pll_scui, pll_uniform };

// Per-instance posterior table S_hat(x~)_{y,q} = P_hat(y | x~, q) built from a
// soft classifier output g (m x c). Columns with zero normalizer are filled
// with the uniform distribution and flagged.
inline RecoveryMap posterior_recovery(const Mat& posterior, const WeakWorld& ww,
                                      PosteriorSetting setting,
                                      const Vec& scui_sigma = Vec()) {
    const int m = ww.world.m;
    const int c = ww.world.c;
    const int v = ww.v;
    require(posterior.rows() == m && posterior.cols() == c,
            "posterior_recovery: posterior must be m x c");
    for (int i = 0; i < m; ++i) {
        double row = 0.0;
        for (int y = 0; y < c; ++y) {
            require(posterior(i, y) >= -1e-12,
                    "posterior_recovery: negative posterior at row " + std::to_string(i));
            row += posterior(i, y);
        }
        require(std::abs(row - 1.0) <= 1e-9,
                "posterior_recovery: posterior row " + std::to_string(i) + " sums to " +
                    JsonWriter::format_double(row));
    }
    if (setting == PosteriorSetting::pll_scui)
        require(scui_sigma.size() == c, "posterior_recovery: pll_scui needs sigma of length c");

    RecoveryMap s;
    s.mode = RecoveryMode::per_instance;
    s.provenance = RecoveryProvenance::posterior;
    s.c = c;
    s.v = v;
    for (int i = 0; i < m; ++i) {
        Mat mat(c, v);
        for (int q = 0; q < v; ++q) {
            Vec w = Vec::Zero(c);
            switch (setting) {
                case PosteriorSetting::nll:
                    // P_hat(y, q | x~) = g(x~)_y * T_hat_{q, y}
                    for (int y = 0; y < c; ++y) w[y] = posterior(i, y) * ww.transition(i).probs(q, y);
                    break;
                case PosteriorSetting::pll_scui: {
                    // g_y * P(q | y) with the candidate-set product form; the
                    // shared sigma factors cancel in the normalization, which
                    // reduces to g_y / sigma_y on candidates when sigma > 0.
                    const int mask = scui_mask_of_index(q);
                    for (int y = 0; y < c; ++y) {
                        if (!(mask & (1 << y))) continue;
                        double p = 1.0;
                        for (int other = 0; other < c; ++other) {
                            if (other == y) continue;
                            p *= (mask & (1 << other)) ? scui_sigma[other] : 1.0 - scui_sigma[other];
                        }
                        w[y] = posterior(i, y) * p;
                    }
                    break;
                }
                case PosteriorSetting::pll_uniform: {
                    const int mask = scui_mask_of_index(q);
                    for (int y = 0; y < c; ++y)
                        if (mask & (1 << y)) w[y] = posterior(i, y);
                    break;
                }
            }
            const double norm = w.sum();
            if (norm <= 0.0) {
                mat.col(q).setConstant(1.0 / c);
                s.uniform_filled.emplace_back(i, q);
            } else {
                mat.col(q) = w / norm;
            }
        }
        s.matrices.push_back(std::move(mat));
    }
    s.validate();
    if (!s.uniform_filled.empty())
        log_warn("posterior_recovery: " + std::to_string(s.uniform_filled.size()) +
                 " zero-normalizer columns filled with the uniform distribution");
    return s;
}

// Expected L1 deviation between the true class posterior and the recovered
// one, averaged over the instance marginal.
inline double expected_bias(const RecoveryMap& s_hat, const WeakWorld& ww) {
    require(s_hat.c == ww.world.c && s_hat.v == ww.v, "expected_bias: dimension mismatch");
    double delta = 0.0;
    for (int i = 0; i < ww.world.m; ++i) {
        const Vec recovered = s_hat.at(i) * ww.weak_posterior.row(i).transpose();
        delta += ww.world.instance_marginal[i] *
                 (ww.world.class_posterior.row(i).transpose() - recovered).lpNorm<1>();
    }
    return delta;
}

// sup over instances of the operator infinity norm (max absolute row sum)
// of S_hat(x)^T S_hat(x).
inline double recovery_magnitude(const RecoveryMap& s_hat) {
    double sup = 0.0;
    for (const Mat& m : s_hat.matrices) {
        const Mat gram = m.transpose() * m;
        sup = std::max(sup, gram.cwiseAbs().rowwise().sum().maxCoeff());
    }
    return sup;
}

// ---------------------------------------------------------------------------

inline std::string recovery_to_json(const RecoveryMap& s) {
    JsonWriter out;
    out.begin_object();
    out.field("mode", to_string(s.mode));
    out.field("provenance", to_string(s.provenance));
    out.field("classes", s.c);
    out.field("weak_values", s.v);
    out.key("matrices").begin_array();
    for (const Mat& m : s.matrices) out.value(m);
    out.end_array();
    out.end_object();
    return out.str();
}

inline RecoveryMap recovery_from_json(const jsonio::json& j, const std::string& path = "") {
    RecoveryMap s;
    const std::string mode = jsonio::at(j, "mode", path).get<std::string>();
    if (mode == "shared")
        s.mode = RecoveryMode::shared;
    else if (mode == "per_instance")
        s.mode = RecoveryMode::per_instance;
    else
        throw ValidationError(path + "/mode: expected 'shared' or 'per_instance'");
    s.provenance = RecoveryProvenance::custom;
    const jsonio::json& list = jsonio::at(j, "matrices", path);
    require(list.is_array() && !list.empty(), path + "/matrices: expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i)
        s.matrices.push_back(jsonio::as_matrix(list[i], path + "/matrices/" + std::to_string(i)));
    s.c = static_cast<int>(s.matrices[0].rows());
    s.v = static_cast<int>(s.matrices[0].cols());
    s.validate();
    return s;
}

}  // namespace wsc
