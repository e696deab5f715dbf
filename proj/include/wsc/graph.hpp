#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "wsc/common.hpp"
#include "wsc/json_io.hpp"
#include "wsc/recovery.hpp"
#include "wsc/world.hpp"

namespace wsc {

enum class GraphKind { self_sup, supervised, weak, perturbation };

inline const char* to_string(GraphKind k) {
    switch (k) {
        case GraphKind::self_sup: return "self_sup";
        case GraphKind::supervised: return "supervised";
        case GraphKind::weak: return "weak";
        default: return "perturbation";
    }
}

inline GraphKind graph_kind_from_string(const std::string& s) {
    if (s == "self_sup") return GraphKind::self_sup;
    if (s == "supervised") return GraphKind::supervised;
    if (s == "weak") return GraphKind::weak;
    if (s == "perturbation") return GraphKind::perturbation;
    throw ValidationError("unknown graph kind '" + s + "'");
}

/// Dense symmetric connectivity matrix over the augmented points, with
/// degrees equal to row sums.
struct Graph {
    GraphKind kind = GraphKind::self_sup;
    int n = 0;
    Mat weights;  // n x n symmetric
    Vec degrees;  // row sums
};

struct NormalizedGraph {
    int n = 0;
    Mat matrix;   // A_{x,x'} / sqrt(A_x A_{x'})
    Vec degrees;  // carried from the source graph
};

struct PerturbationConfig {
    double alpha = 1.0;
    double beta = 0.0;
};

inline void validate_perturbation(const PerturbationConfig& cfg) {
    require(cfg.alpha >= 0.0 && cfg.beta >= 0.0, "PerturbationConfig: alpha, beta must be >= 0");
    require(cfg.alpha + cfg.beta > 0.0, "PerturbationConfig: alpha + beta must be positive");
}

namespace detail {

inline Graph finish_graph(GraphKind kind, Mat weights, bool require_nonneg) {
    // products of the form K^T M K are symmetric only up to roundoff;
    // symmetrize so the 1e-12 invariant holds exactly
    weights = 0.5 * (weights + weights.transpose()).eval();
    Graph g;
    g.kind = kind;
    g.n = static_cast<int>(weights.rows());
    if (require_nonneg) {
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                require(weights(i, j) >= -1e-12, std::string("graph(") + to_string(kind) +
                                                     "): negative weight at (" + std::to_string(i) +
                                                     ", " + std::to_string(j) + ")");
    }
    g.weights = std::move(weights);
    g.degrees = g.weights.rowwise().sum();
    return g;
}

}  // namespace detail

// w^u_{x,x'}: probability mass of x and x' arising as two augmentations of a
// common natural instance. Total mass sums to 1.
inline Graph self_supervised_weights(const WorldModel& world) {
    const Mat weighted = world.instance_marginal.asDiagonal() * world.aug_kernel;
    return detail::finish_graph(GraphKind::self_sup, world.aug_kernel.transpose() * weighted, true);
}

// w^l_{x,x'}: two independent labeled draws with matching classes.
inline Graph supervised_weights(const WorldModel& world) {
    // sum_y P(y|x~) P(y|x~') factorizes through the m x c posterior
    const Mat t = world.class_posterior.transpose() * world.instance_marginal.asDiagonal() *
                  world.aug_kernel;  // c x n
    return detail::finish_graph(GraphKind::supervised, t.transpose() * t, true);
}

// w^wl(S): supervised connectivity reconstructed through the recovery map.
// May contain negative entries for approximate S.
inline Graph weak_supervised_weights(const WeakWorld& ww, const RecoveryMap& s) {
    require(s.c == ww.world.c && s.v == ww.v, "weak_supervised_weights: S dimensions mismatch");
    // recovered posterior u(x~) = S(x~) P(q|x~); the pair weight
    // S((x~,q~),(x~',q~')) marginalizes to u(x~) . u(x~')
    Mat u(ww.world.m, ww.world.c);
    for (int i = 0; i < ww.world.m; ++i)
        u.row(i) = (s.at(i) * ww.weak_posterior.row(i).transpose()).transpose();
    const Mat t = u.transpose() * ww.world.instance_marginal.asDiagonal() * ww.world.aug_kernel;
    return detail::finish_graph(GraphKind::weak, t.transpose() * t, false);
}

inline Graph perturbation_graph(const Graph& gu, const Graph& gl_or_gwl,
                                const PerturbationConfig& cfg) {
    validate_perturbation(cfg);
    require(gu.kind == GraphKind::self_sup, "perturbation_graph: first graph must be self_sup");
    require(gu.n == gl_or_gwl.n, "perturbation_graph: dimension mismatch");
    const bool other_nonneg = gl_or_gwl.weights.minCoeff() >= -1e-12;
    return detail::finish_graph(GraphKind::perturbation,
                                cfg.alpha * gu.weights + cfg.beta * gl_or_gwl.weights,
                                other_nonneg);
}

inline NormalizedGraph normalize(const Graph& g) {
    for (int i = 0; i < g.n; ++i)
        if (!(g.degrees[i] > 0.0))
            throw NumericError("normalize: vertex " + std::to_string(i) +
                               " has nonpositive degree " + JsonWriter::format_double(g.degrees[i]));
    NormalizedGraph ng;
    ng.n = g.n;
    ng.degrees = g.degrees;
    const Vec inv_sqrt = g.degrees.cwiseSqrt().cwiseInverse();
    ng.matrix = inv_sqrt.asDiagonal() * g.weights * inv_sqrt.asDiagonal();
    ng.matrix = 0.5 * (ng.matrix + ng.matrix.transpose()).eval();
    return ng;
}

// ---------------------------------------------------------------------------
// Export / import. JSON round trips are bit-exact (17 significant digits).

inline std::string graph_to_json(const Graph& g) {
    JsonWriter out;
    out.begin_object();
    out.field("n", g.n);
    out.field("kind", to_string(g.kind));
    out.field("weights", g.weights);
    out.field("degrees", g.degrees);
    out.end_object();
    return out.str();
}

inline Graph graph_from_json(const jsonio::json& j, const std::string& path = "") {
    Graph g;
    g.n = jsonio::as_int(jsonio::at(j, "n", path), path + "/n");
    g.kind = graph_kind_from_string(jsonio::at(j, "kind", path).get<std::string>());
    g.weights = jsonio::as_matrix(jsonio::at(j, "weights", path), path + "/weights");
    require(g.weights.rows() == g.n && g.weights.cols() == g.n, path + "/weights: expected n x n");
    require((g.weights - g.weights.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
            path + "/weights: matrix is not symmetric");
    g.degrees = g.weights.rowwise().sum();
    return g;
}

inline std::string graph_to_csv(const Graph& g) {
    std::ostringstream out;
    out << "# n=" << g.n << " kind=" << to_string(g.kind) << "\n";
    char buf[40];
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", g.weights(i, j));
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
    return out.str();
}

inline Graph graph_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    int n = 0;
    char kind_buf[32] = {0};
    if (std::sscanf(header.c_str(), "# n=%d kind=%31s", &n, kind_buf) != 2)
        throw ValidationError("graph_from_csv: bad header '" + header + "'");
    Graph g;
    g.n = n;
    g.kind = graph_kind_from_string(kind_buf);
    g.weights.resize(n, n);
    std::string line;
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw ValidationError("graph_from_csv: truncated at row " + std::to_string(i));
        std::istringstream row(line);
        std::string cell;
        for (int j = 0; j < n; ++j) {
            if (!std::getline(row, cell, ','))
                throw ValidationError("graph_from_csv: row " + std::to_string(i) + " truncated");
            g.weights(i, j) = std::strtod(cell.c_str(), nullptr);
        }
    }
    g.degrees = g.weights.rowwise().sum();
    return g;
}

}  // namespace wsc
