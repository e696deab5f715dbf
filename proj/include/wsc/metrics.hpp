#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "wsc/common.hpp"
#include "wsc/graph.hpp"
#include "wsc/json_io.hpp"
#include "wsc/recovery.hpp"
#include "wsc/spectral.hpp"
#include "wsc/world.hpp"

namespace wsc {

/// Explicit finite table of candidate coordinate functions over a fixed
/// sample of size n (for exhaustive Rademacher enumeration, n <= 20).
struct HypothesisTable {
    std::vector<Vec> functions;

    int sample_size() const {
        require(!functions.empty(), "HypothesisTable: empty table");
        return static_cast<int>(functions[0].size());
    }
};

struct BoundReport {
    double gamma = 0.0;
    std::map<int, double> rho_u;  // sparsest i-partition of the self-sup graph
    std::map<int, double> rho;    // same for the perturbation graph
    bool rho_skipped = false;
    double alpha_star = 0.0, beta_star = 0.0;
    double delta_lambda = 0.0;
    double delta_s = 0.0;      // expected bias of the recovery
    double s_magnitude = 0.0;  // sup_x ||S^T S||_inf
    double kappa = 0.0;        // max |f| over the evaluated feature table
    double eta0 = 0.0, eta1 = 0.0, eta2 = 0.0, eta3 = 0.0, eta4 = 0.0;
    double eta_n_delta = 0.0;  // sqrt(log(2/delta)/n) + delta/2
    int d = 0;
    int n_samples = 0, n_q = 0;
    double delta = 0.0;
};

// Phi(Omega) = cut(Omega) / vol(Omega) over the graph's weighted degrees.
inline double dirichlet_conductance(const Graph& g, const std::vector<int>& omega) {
    require(!omega.empty(), "dirichlet_conductance: empty subset");
    std::vector<char> in_set(static_cast<std::size_t>(g.n), 0);
    for (int x : omega) {
        require(x >= 0 && x < g.n, "dirichlet_conductance: vertex index out of range");
        in_set[static_cast<std::size_t>(x)] = 1;
    }
    double volume = 0.0, internal = 0.0;
    for (int x = 0; x < g.n; ++x) {
        if (!in_set[static_cast<std::size_t>(x)]) continue;
        volume += g.degrees[x];
        for (int y = 0; y < g.n; ++y)
            if (in_set[static_cast<std::size_t>(y)]) internal += g.weights(x, y);
    }
    if (!(volume > 0.0)) throw NumericError("dirichlet_conductance: subset has zero volume");
    return (volume - internal) / volume;
}

struct SparsestPartition {
    double rho = 0.0;
    std::vector<int> assignment;  // block index per vertex
};

namespace detail {

// Exhaustive minimization over partitions into exactly `blocks` non-empty
// sets, enumerated as restricted growth strings. Block volumes and internal
// mass are maintained incrementally; branches prune on the running max once
// every block is non-empty and already at or above the best value.
class PartitionSearch {
public:
    PartitionSearch(const Graph& g, int blocks) : g_(g), blocks_(blocks) {
        volume_.assign(static_cast<std::size_t>(blocks), 0.0);
        internal_.assign(static_cast<std::size_t>(blocks), 0.0);
        assignment_.assign(static_cast<std::size_t>(g.n), -1);
        best_.rho = std::numeric_limits<double>::infinity();
    }

    SparsestPartition run() {
        place(0, 0);
        return best_;
    }

private:
    double block_phi(int b) const {
        return (volume_[static_cast<std::size_t>(b)] - internal_[static_cast<std::size_t>(b)]) /
               volume_[static_cast<std::size_t>(b)];
    }

    void place(int vertex, int used) {
        if (vertex == g_.n) {
            if (used != blocks_) return;
            double worst = 0.0;
            for (int b = 0; b < blocks_; ++b) {
                if (!(volume_[static_cast<std::size_t>(b)] > 0.0)) return;
                worst = std::max(worst, block_phi(b));
                if (worst >= best_.rho) return;
            }
            best_.rho = worst;
            best_.assignment = assignment_;
            return;
        }
        // restricted growth: vertex may join an existing block or open block `used`
        const int limit = std::min(used + 1, blocks_);
        for (int b = 0; b < limit; ++b) {
            const int next_used = std::max(used, b + 1);
            // remaining vertices must suffice to open the still-empty blocks
            if (g_.n - (vertex + 1) < blocks_ - next_used) continue;
            const double add_internal = joint_mass(vertex, b);
            assignment_[static_cast<std::size_t>(vertex)] = b;
            volume_[static_cast<std::size_t>(b)] += g_.degrees[vertex];
            internal_[static_cast<std::size_t>(b)] += add_internal;
            place(vertex + 1, next_used);
            volume_[static_cast<std::size_t>(b)] -= g_.degrees[vertex];
            internal_[static_cast<std::size_t>(b)] -= add_internal;
            assignment_[static_cast<std::size_t>(vertex)] = -1;
        }
    }

    double joint_mass(int vertex, int block) const {
        double s = g_.weights(vertex, vertex);  // self loop counts once into internal mass
        for (int other = 0; other < vertex; ++other)
            if (assignment_[static_cast<std::size_t>(other)] == block)
                s += 2.0 * g_.weights(vertex, other);
        return s;
    }

    const Graph& g_;
    int blocks_;
    std::vector<double> volume_;
    std::vector<double> internal_;
    std::vector<int> assignment_;
    SparsestPartition best_;
};

}  // namespace detail

// Exact sparsest i-partition by brute force (n <= 12).
inline SparsestPartition sparsest_partition(const Graph& g, int i) {
    require(i >= 2 && i <= g.n, "sparsest_partition: need 2 <= i <= n");
    if (g.n > 12)
        throw ValidationError("sparsest_partition: brute-force cap exceeded (n = " +
                              std::to_string(g.n) + " > 12)");
    detail::PartitionSearch search(g, i);
    SparsestPartition best = search.run();
    if (!std::isfinite(best.rho))
        throw NumericError("sparsest_partition: no partition with positive block volumes");
    return best;
}

struct GammaConsistency {
    double gamma = 0.0;           // minimum achievable labeling error on augmented points
    std::vector<int> labeler;     // achieving pseudo-labeler over augmented points
};

// gamma* = E_x[1 - max_y P(y | x)]: the error of the best pseudo-labeler on
// augmented data, attained by the pointwise posterior argmax.
inline GammaConsistency gamma_consistency(const WorldModel& world) {
    const Mat point_class = world.aug_kernel.transpose() * world.joint;  // n x c joint mass
    GammaConsistency out;
    out.labeler.resize(static_cast<std::size_t>(world.n));
    double agreement = 0.0;
    for (int x = 0; x < world.n; ++x) {
        int best = 0;
        for (int y = 1; y < world.c; ++y)
            if (point_class(x, y) > point_class(x, best)) best = y;
        out.labeler[static_cast<std::size_t>(x)] = best;
        agreement += point_class(x, best);
    }
    out.gamma = 1.0 - agreement;
    return out;
}

// E_sigma[sup_f sum_j sigma_j f(x_j)] by exhaustive enumeration of all 2^n
// sign vectors (sum form, no 1/n factor). Gray-code order keeps the running
// sums incremental.
inline double rademacher_complexity(const HypothesisTable& table) {
    const int n = table.sample_size();
    require(n <= 20, "rademacher_complexity: cap exceeded (n = " + std::to_string(n) + " > 20)");
    for (const Vec& f : table.functions)
        require(static_cast<int>(f.size()) == n, "rademacher_complexity: uneven function lengths");

    const std::size_t count = table.functions.size();
    std::vector<double> sums(count);
    for (std::size_t k = 0; k < count; ++k) sums[k] = table.functions[k].sum();  // all sigma = +1

    const std::uint64_t total = 1ULL << n;
    double acc = 0.0;
    std::uint64_t gray = 0;
    for (std::uint64_t it = 0;; ++it) {
        double sup = sums[0];
        for (std::size_t k = 1; k < count; ++k) sup = std::max(sup, sums[k]);
        acc += sup;
        if (it + 1 == total) break;
        const std::uint64_t next_gray = (it + 1) ^ ((it + 1) >> 1);
        const int flip = static_cast<int>(std::countr_zero(gray ^ next_gray));
        const bool now_negative = (next_gray >> flip) & 1ULL;
        const double sign = now_negative ? -2.0 : 2.0;
        for (std::size_t k = 0; k < count; ++k) sums[k] += sign * table.functions[k][flip];
        gray = next_gray;
    }
    return acc / static_cast<double>(total);
}

// Def-style max over samples: functions are given over the full point set and
// all n-tuples are enumerated (|X|^n capped at 1e6).
inline double rademacher_complexity_max(const std::vector<Vec>& functions_over_points, int n) {
    require(!functions_over_points.empty(), "rademacher_complexity_max: empty table");
    const int points = static_cast<int>(functions_over_points[0].size());
    double tuples = 1.0;
    for (int i = 0; i < n; ++i) {
        tuples *= points;
        require(tuples <= 1e6, "rademacher_complexity_max: |X|^n exceeds 1e6");
    }
    std::vector<int> tuple(static_cast<std::size_t>(n), 0);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
        HypothesisTable table;
        for (const Vec& f : functions_over_points) {
            Vec restricted(n);
            for (int j = 0; j < n; ++j) restricted[j] = f[tuple[static_cast<std::size_t>(j)]];
            table.functions.push_back(std::move(restricted));
        }
        best = std::max(best, rademacher_complexity(table));
        int pos = n - 1;
        while (pos >= 0 && ++tuple[static_cast<std::size_t>(pos)] == points) {
            tuple[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return best;
}

// Evaluates every measurable input of the error bounds. The bound itself is
// never asserted (unspecified constants); the JSON schema carries
// "bound_asserted": false.
inline BoundReport bound_report(const WorldModel& world, const WeakWorld& ww,
                                const RecoveryMap& s_hat, const PerturbationConfig& cfg,
                                const Mat& f, int d, int n_samples, int n_q, double delta,
                                int rho_max_i = 8, bool skip_partitions = false) {
    validate_perturbation(cfg);
    require(delta > 0.0 && delta < 1.0, "bound_report: delta must be in (0, 1)");
    BoundReport r;
    r.d = d;
    r.n_samples = n_samples;
    r.n_q = n_q;
    r.delta = delta;

    r.gamma = gamma_consistency(world).gamma;

    const Graph gu = self_supervised_weights(world);
    const Graph gwl = weak_supervised_weights(ww, s_hat);
    const Graph perturbed = perturbation_graph(gu, gwl, cfg);

    if (!skip_partitions && world.n <= 12) {
        const int max_i = std::min({rho_max_i, world.n});
        for (int i = 2; i <= max_i; ++i) {
            r.rho_u[i] = sparsest_partition(gu, i).rho;
            r.rho[i] = sparsest_partition(perturbed, i).rho;
        }
    } else {
        r.rho_skipped = true;
    }

    const double blend = cfg.alpha + cfg.beta / world.c;
    r.alpha_star = cfg.alpha / blend;
    r.beta_star = (cfg.beta / world.c) / blend;

    r.delta_lambda = eigengap(eigendecompose(normalize(perturbed)), d);
    r.delta_s = expected_bias(s_hat, ww);
    r.s_magnitude = recovery_magnitude(s_hat);

    r.kappa = f.size() > 0 ? f.cwiseAbs().maxCoeff() : 0.0;
    const double kd = r.kappa * d;
    const double k2d = r.kappa * r.kappa * d;
    r.eta0 = 64.0 * (kd + kd * kd);
    r.eta1 = 8.0 * k2d + 2.0 * r.kappa * r.kappa * k2d * d;  // 8 k^2 d + 2 k^4 d^2
    r.eta2 = 64.0 * kd;
    r.eta3 = 8.0 * k2d;
    r.eta4 = 24.0 * k2d;
    r.eta_n_delta = std::sqrt(std::log(2.0 / delta) / n_samples) + delta / 2.0;
    return r;
}

inline std::string bound_report_to_json(const BoundReport& r) {
    JsonWriter out;
    out.begin_object();
    out.field("bound_asserted", false);
    out.field("gamma", r.gamma);
    out.field("alpha_star", r.alpha_star);
    out.field("beta_star", r.beta_star);
    out.field("delta_lambda", r.delta_lambda);
    out.field("delta_s", r.delta_s);
    out.field("s_magnitude", r.s_magnitude);
    out.field("kappa", r.kappa);
    out.field("d", r.d);
    out.field("rho_skipped", r.rho_skipped);
    auto rho_map = [&](const char* name, const std::map<int, double>& m) {
        out.key(name).begin_object();
        for (const auto& [i, value] : m) out.field(std::to_string(i), value);
        out.end_object();
    };
    rho_map("rho_u", r.rho_u);
    rho_map("rho", r.rho);
    out.key("eta").begin_array();
    out.value(r.eta0).value(r.eta1).value(r.eta2).value(r.eta3).value(r.eta4);
    out.end_array();
    out.field("eta_n_delta", r.eta_n_delta);
    out.field("n_samples", r.n_samples);
    out.field("n_q", r.n_q);
    out.field("delta", r.delta);
    out.end_object();
    return out.str();
}

}  // namespace wsc
