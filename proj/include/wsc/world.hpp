#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "wsc/common.hpp"
#include "wsc/json_io.hpp"

namespace wsc {

/// Finite generative world: joint instance/class prior and a row-stochastic
/// augmentation kernel over an enumerated set of augmented points. Immutable
/// after construction; derived marginals are precomputed.
struct WorldModel {
    int m = 0;  // natural instances
    int c = 0;  // classes
    int n = 0;  // augmented points

    Mat joint;       // m x c, entries >= 0, total mass 1
    Mat aug_kernel;  // m x n, rows stochastic

    // derived
    Vec instance_marginal;  // P(x~), length m
    Vec class_prior;        // P(y), length c
    Vec aug_marginal;       // P(x), length n
    Mat class_posterior;    // P(y | x~), m x c

    bool uniform_prior(double tol = 1e-12) const {
        return (class_prior.array() - 1.0 / c).abs().maxCoeff() <= tol;
    }
};

/// v x c matrix; column j is the distribution of the weak label given class j.
struct TransitionMatrix {
    int v = 0;
    int c = 0;
    Mat probs;  // v x c, column-stochastic
};

/// Per-class flip-in probabilities for candidate-set generation.
struct ScuiParams {
    Vec sigma;  // length c, each in [0, 1)
};

struct WeakWorld {
    WorldModel world;
    std::vector<TransitionMatrix> transitions;  // size 1 (global) or m (per instance)
    bool global = true;
    int v = 0;
    Mat weak_posterior;  // P(q | x~), m x v

    const TransitionMatrix& transition(int instance) const {
        return global ? transitions[0] : transitions[static_cast<std::size_t>(instance)];
    }
};

struct WeakDataset {
    std::vector<std::pair<int, int>> labeled;  // (instance_index, weak_index)
    std::vector<int> unlabeled;                // instance_index
    std::uint64_t seed = 0;
};

struct ViewBatch {
    std::vector<std::pair<int, int>> pairs;  // (aug_index_view1, aug_index_view2)
    std::vector<std::uint8_t> is_labeled;
    std::vector<int> weak_indices;  // aligned with labeled entries, -1 for unlabeled
};

// ---------------------------------------------------------------------------

inline WorldModel build_world(int m, int c, int n, Mat joint, Mat aug_kernel) {
    require(m >= 1 && c >= 1 && n >= 1, "build_world: m, c, n must be positive");
    require(joint.rows() == m && joint.cols() == c,
            "build_world: joint must be m x c (got " + std::to_string(joint.rows()) + " x " +
                std::to_string(joint.cols()) + ")");
    require(aug_kernel.rows() == m && aug_kernel.cols() == n,
            "build_world: aug_kernel must be m x n (got " + std::to_string(aug_kernel.rows()) +
                " x " + std::to_string(aug_kernel.cols()) + ")");

    for (int i = 0; i < m; ++i)
        for (int j = 0; j < c; ++j)
            require(joint(i, j) >= 0.0, "build_world: negative probability at joint row " +
                                            std::to_string(i) + ", col " + std::to_string(j));
    const double total = joint.sum();
    if (std::abs(total - 1.0) > 1e-9) {
        Eigen::Index worst = 0;
        const Vec row_sums = joint.rowwise().sum();
        row_sums.maxCoeff(&worst);
        throw ValidationError("build_world: joint mass " + JsonWriter::format_double(total) +
                              " != 1 (largest row sum at joint row " + std::to_string(worst) + ")");
    }
    joint /= total;  // absorb drift <= 1e-9 so stored invariants hold to 1e-12

    for (int i = 0; i < m; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            require(aug_kernel(i, j) >= 0.0, "build_world: negative probability at aug_kernel row " +
                                                 std::to_string(i) + ", col " + std::to_string(j));
            row += aug_kernel(i, j);
        }
        require(std::abs(row - 1.0) <= 1e-9, "build_world: aug_kernel row " + std::to_string(i) +
                                                 " sums to " + JsonWriter::format_double(row));
        aug_kernel.row(i) /= row;
    }

    WorldModel w;
    w.m = m;
    w.c = c;
    w.n = n;
    w.joint = std::move(joint);
    w.aug_kernel = std::move(aug_kernel);
    w.instance_marginal = w.joint.rowwise().sum();
    w.class_prior = w.joint.colwise().sum().transpose();
    w.aug_marginal = w.aug_kernel.transpose() * w.instance_marginal;

    for (int j = 0; j < c; ++j)
        require(w.class_prior[j] > 0.0,
                "build_world: class " + std::to_string(j) + " has zero marginal probability");
    for (int i = 0; i < m; ++i)
        require(w.instance_marginal[i] > 0.0,
                "build_world: instance " + std::to_string(i) + " has zero marginal probability");
    for (int x = 0; x < n; ++x)
        require(w.aug_marginal[x] > 0.0,
                "build_world: augmented point " + std::to_string(x) + " is unreachable");

    w.class_posterior = w.joint.array().colwise() / w.instance_marginal.array();
    return w;
}

// Symmetric noise keeps the label with probability 1-rate and reassigns to
// each of the other c-1 classes with probability rate/(c-1). The convention
// excludes the true class from reassignment (see CLI help).
inline TransitionMatrix symmetric_noise_matrix(int c, double rate) {
    require(c >= 2, "symmetric_noise_matrix: c must be >= 2");
    require(rate >= 0.0 && rate < 1.0, "symmetric_noise_matrix: rate must be in [0, 1)");
    TransitionMatrix t;
    t.v = c;
    t.c = c;
    t.probs = Mat::Constant(c, c, rate / (c - 1));
    t.probs.diagonal().setConstant(1.0 - rate);
    return t;
}

// Class-dependent pair noise: y flips to (y+1 mod c) with the given rate.
inline TransitionMatrix asymmetric_pair_noise_matrix(int c, double rate) {
    require(c >= 2, "asymmetric_pair_noise_matrix: c must be >= 2");
    require(rate >= 0.0 && rate < 1.0, "asymmetric_pair_noise_matrix: rate must be in [0, 1)");
    TransitionMatrix t;
    t.v = c;
    t.c = c;
    t.probs = Mat::Zero(c, c);
    for (int y = 0; y < c; ++y) {
        t.probs(y, y) = 1.0 - rate;
        t.probs((y + 1) % c, y) = rate;
    }
    return t;
}

// Weak index <-> candidate-set bitmask for the partial-label encoding:
// weak index q corresponds to mask q+1, enumerating all non-empty subsets
// in ascending bitmask order.
inline int scui_mask_of_index(int weak_index) { return weak_index + 1; }
inline int scui_index_of_mask(int mask) { return mask - 1; }

// Candidate sets always contain the true label; every other label joins
// independently with its class-specific flip-in probability.
inline TransitionMatrix scui_transition(int c, const ScuiParams& params) {
    require(c >= 2 && c <= 12, "scui_transition: c must be in [2, 12] (dense 2^c-1 enumeration)");
    require(params.sigma.size() == c, "scui_transition: sigma must have length c");
    for (int y = 0; y < c; ++y)
        require(params.sigma[y] >= 0.0 && params.sigma[y] < 1.0,
                "scui_transition: sigma[" + std::to_string(y) + "] must be in [0, 1)");

    const int v = (1 << c) - 1;
    TransitionMatrix t;
    t.v = v;
    t.c = c;
    t.probs = Mat::Zero(v, c);
    for (int mask = 1; mask <= v; ++mask) {
        for (int y = 0; y < c; ++y) {
            if (!(mask & (1 << y))) continue;
            double p = 1.0;
            for (int other = 0; other < c; ++other) {
                if (other == y) continue;
                p *= (mask & (1 << other)) ? params.sigma[other] : 1.0 - params.sigma[other];
            }
            t.probs(scui_index_of_mask(mask), y) = p;
        }
    }
    return t;
}

inline void validate_transition(const TransitionMatrix& t, const std::string& what) {
    require(t.probs.rows() == t.v && t.probs.cols() == t.c, what + ": shape mismatch");
    for (int j = 0; j < t.c; ++j) {
        double col = 0.0;
        for (int i = 0; i < t.v; ++i) {
            require(t.probs(i, j) >= 0.0, what + ": negative entry at (" + std::to_string(i) +
                                              ", " + std::to_string(j) + ")");
            col += t.probs(i, j);
        }
        require(std::abs(col - 1.0) <= 1e-9,
                what + ": column " + std::to_string(j) + " sums to " + JsonWriter::format_double(col));
    }
}

inline WeakWorld make_weak_world(WorldModel world, std::vector<TransitionMatrix> transitions) {
    require(!transitions.empty(), "make_weak_world: at least one transition required");
    const bool global = transitions.size() == 1;
    require(global || static_cast<int>(transitions.size()) == world.m,
            "make_weak_world: need 1 global transition or one per instance");
    const int v = transitions[0].v;
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        require(transitions[i].c == world.c,
                "make_weak_world: transition " + std::to_string(i) + " class count mismatch");
        require(transitions[i].v == v,
                "make_weak_world: transition " + std::to_string(i) + " has v=" +
                    std::to_string(transitions[i].v) + ", expected " + std::to_string(v));
        validate_transition(transitions[i], "make_weak_world: transition " + std::to_string(i));
    }

    WeakWorld ww;
    ww.world = std::move(world);
    ww.transitions = std::move(transitions);
    ww.global = global;
    ww.v = v;
    ww.weak_posterior.resize(ww.world.m, v);
    for (int i = 0; i < ww.world.m; ++i) {
        const Vec q = ww.transition(i).probs * ww.world.class_posterior.row(i).transpose();
        double mass = 0.0;
        for (int k = 0; k < v; ++k) {
            require(q[k] >= -1e-10, "make_weak_world: P(q|x~) negative for instance " +
                                        std::to_string(i) + ", weak index " + std::to_string(k));
            mass += q[k];
        }
        require(std::abs(mass - 1.0) <= 1e-10,
                "make_weak_world: P(q|x~) for instance " + std::to_string(i) + " sums to " +
                    JsonWriter::format_double(mass));
        ww.weak_posterior.row(i) = q.transpose();
    }
    return ww;
}

inline WeakWorld make_weak_world(WorldModel world, TransitionMatrix transition) {
    std::vector<TransitionMatrix> ts;
    ts.push_back(std::move(transition));
    return make_weak_world(std::move(world), std::move(ts));
}

// ---------------------------------------------------------------------------
// Sampling. Pure functions of (inputs, seed): repeated calls agree bit-exactly.

inline WeakDataset sample_weak_dataset(const WeakWorld& ww, int n_q, int n_u, std::uint64_t seed) {
    require(n_q >= 0 && n_u >= 0, "sample_weak_dataset: counts must be >= 0");
    WeakDataset ds;
    ds.seed = seed;
    ds.labeled.reserve(static_cast<std::size_t>(n_q));
    ds.unlabeled.reserve(static_cast<std::size_t>(n_u));
    Rng labeled_rng(seed, 1);
    Rng unlabeled_rng(seed, 2);
    for (int i = 0; i < n_q; ++i) {
        const int inst = labeled_rng.next_index(ww.world.instance_marginal);
        const int weak = labeled_rng.next_index(ww.weak_posterior.row(inst).transpose());
        ds.labeled.emplace_back(inst, weak);
    }
    for (int i = 0; i < n_u; ++i)
        ds.unlabeled.push_back(unlabeled_rng.next_index(ww.world.instance_marginal));
    return ds;
}

inline ViewBatch sample_augmented_views(const WorldModel& world, const WeakDataset& ds,
                                        std::uint64_t seed) {
    ViewBatch batch;
    Rng rng(seed, 3);
    auto draw_pair = [&](int inst) {
        require(inst >= 0 && inst < world.m,
                "sample_augmented_views: instance index " + std::to_string(inst) + " out of range");
        const Vec row = world.aug_kernel.row(inst).transpose();
        const int v1 = rng.next_index(row);
        const int v2 = rng.next_index(row);
        batch.pairs.emplace_back(v1, v2);
    };
    for (const auto& [inst, weak] : ds.labeled) {
        draw_pair(inst);
        batch.is_labeled.push_back(1);
        batch.weak_indices.push_back(weak);
    }
    for (int inst : ds.unlabeled) {
        draw_pair(inst);
        batch.is_labeled.push_back(0);
        batch.weak_indices.push_back(-1);
    }
    return batch;
}

// ---------------------------------------------------------------------------
// World specification file.
// {"instances": m, "classes": c, "aug_points": n, "joint": [[..]],
//  "aug_kernel": [[..]], "weak": {"mode": "...", ...}}

inline TransitionMatrix transition_from_json(const jsonio::json& j, int c, const std::string& path) {
    const std::string mode = jsonio::at(j, "mode", path).get<std::string>();
    if (mode == "symmetric")
        return symmetric_noise_matrix(c, jsonio::as_number(jsonio::at(j, "rate", path), path + "/rate"));
    if (mode == "asymmetric")
        return asymmetric_pair_noise_matrix(c, jsonio::as_number(jsonio::at(j, "rate", path), path + "/rate"));
    if (mode == "scui") {
        ScuiParams p;
        p.sigma = jsonio::as_vector(jsonio::at(j, "sigma", path), path + "/sigma");
        return scui_transition(c, p);
    }
    if (mode == "global") {
        TransitionMatrix t;
        t.probs = jsonio::as_matrix(jsonio::at(j, "probs", path), path + "/probs");
        t.v = static_cast<int>(t.probs.rows());
        t.c = static_cast<int>(t.probs.cols());
        require(t.c == c, path + "/probs: expected " + std::to_string(c) + " columns");
        validate_transition(t, path + "/probs");
        return t;
    }
    throw ValidationError(path + "/mode: unknown mode '" + mode + "'");
}

inline WorldModel world_from_json(const jsonio::json& j, const std::string& path = "") {
    const int m = jsonio::as_int(jsonio::at(j, "instances", path), path + "/instances");
    const int c = jsonio::as_int(jsonio::at(j, "classes", path), path + "/classes");
    const int n = jsonio::as_int(jsonio::at(j, "aug_points", path), path + "/aug_points");
    Mat joint = jsonio::as_matrix(jsonio::at(j, "joint", path), path + "/joint");
    Mat kernel = jsonio::as_matrix(jsonio::at(j, "aug_kernel", path), path + "/aug_kernel");
    return build_world(m, c, n, std::move(joint), std::move(kernel));
}

inline WeakWorld weak_world_from_json(const jsonio::json& j, const std::string& path = "") {
    WorldModel world = world_from_json(j, path);
    const jsonio::json& weak = jsonio::at(j, "weak", path);
    const std::string wpath = path + "/weak";
    const std::string mode = jsonio::at(weak, "mode", wpath).get<std::string>();
    if (mode == "per_instance") {
        const jsonio::json& list = jsonio::at(weak, "transitions", wpath);
        require(list.is_array() && static_cast<int>(list.size()) == world.m,
                wpath + "/transitions: expected one entry per instance");
        std::vector<TransitionMatrix> ts;
        for (std::size_t i = 0; i < list.size(); ++i) {
            TransitionMatrix t;
            const std::string tpath = wpath + "/transitions/" + std::to_string(i);
            t.probs = jsonio::as_matrix(list[i], tpath);
            t.v = static_cast<int>(t.probs.rows());
            t.c = static_cast<int>(t.probs.cols());
            validate_transition(t, tpath);
            ts.push_back(std::move(t));
        }
        return make_weak_world(std::move(world), std::move(ts));
    }
    TransitionMatrix t = transition_from_json(weak, world.c, wpath);
    return make_weak_world(std::move(world), std::move(t));
}

inline std::string world_to_json(const WorldModel& w) {
    JsonWriter out;
    out.begin_object();
    out.field("instances", w.m);
    out.field("classes", w.c);
    out.field("aug_points", w.n);
    out.field("joint", w.joint);
    out.field("aug_kernel", w.aug_kernel);
    out.end_object();
    return out.str();
}

}  // namespace wsc
