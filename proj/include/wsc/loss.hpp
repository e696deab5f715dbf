#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "wsc/common.hpp"
#include "wsc/graph.hpp"
#include "wsc/recovery.hpp"
#include "wsc/spectral.hpp"
#include "wsc/world.hpp"

namespace wsc {

// Feature tables are plain n x d matrices: row x is f_x. The embedding is
// F_x = sqrt(A_x) f_x with A_x the perturbation-graph degree.

struct LossBreakdown {
    double l1 = 0, l2 = 0, l3 = 0, l4 = 0, l5 = 0;
    double l_wsc = 0;
    bool uniform_mode = false;   // class prior is uniform
    double l_wsc_uniform3 = 0;   // -2a L1 - 2b L2 + (a + b/c)^2 L3, set in uniform_mode
    double alpha = 0, beta = 0;
};

enum class EstimatorVariant {
    verbatim,     // the pseudocode as written, including same-sample diagonal pairs
    u_statistic,  // diagonal pairs excluded, normalizers reduced to retained pair counts
};

enum class BatchEstimator { automatic, uniform, general };

struct TrainConfig {
    int d = 2;
    double step_size = 1.0;
    int max_steps = 1000;
    int batch_q = 8;
    int batch_u = 8;
    bool minibatch = false;
    BatchEstimator estimator = BatchEstimator::automatic;
    std::uint64_t seed = 0;
    double init_scale = 0.1;
};

struct TrainResult {
    Mat features;  // n x d
    std::vector<double> loss_trajectory;
    std::vector<double> grad_norms;  // aligned with loss_trajectory
    bool converged = false;
    int steps_used = 0;
    double optimum_objective = 0.0;  // PSD-truncation optimum of ||A~ - FF^T||_F^2
};

// ---------------------------------------------------------------------------
// Population quantities. All expectations are exact finite sums.

namespace detail {

struct PopulationTerms {
    Graph gu;
    Graph gwl;
    Graph perturbed;
    Vec aug_marginal;  // P(x)
    Vec weak_degree;   // b_x: row sums of w^wl
};

inline PopulationTerms population_terms(const WeakWorld& ww, const RecoveryMap& s,
                                        const PerturbationConfig& cfg) {
    PopulationTerms t;
    t.gu = self_supervised_weights(ww.world);
    t.gwl = weak_supervised_weights(ww, s);
    t.perturbed = perturbation_graph(t.gu, t.gwl, cfg);
    t.aug_marginal = ww.world.aug_marginal;
    t.weak_degree = t.gwl.degrees;
    return t;
}

inline double pair_sum(const Mat& weights, const Mat& f) {
    return f.cwiseProduct(weights * f).sum();
}

}  // namespace detail

inline LossBreakdown population_loss(const Mat& f, const WeakWorld& ww, const RecoveryMap& s,
                                     const PerturbationConfig& cfg) {
    require(f.rows() == ww.world.n, "population_loss: features must have one row per augmented point");
    validate_perturbation(cfg);
    const auto terms = detail::population_terms(ww, s, cfg);

    LossBreakdown out;
    out.alpha = cfg.alpha;
    out.beta = cfg.beta;
    out.l1 = detail::pair_sum(terms.gu.weights, f);
    out.l2 = detail::pair_sum(terms.gwl.weights, f);
    // (f_x . f_x')^2 sums factor through d x d moment matrices
    const Mat mp = f.transpose() * terms.aug_marginal.asDiagonal() * f;
    const Mat mb = f.transpose() * terms.weak_degree.asDiagonal() * f;
    out.l3 = mp.squaredNorm();
    out.l4 = mb.squaredNorm();
    out.l5 = mb.cwiseProduct(mp).sum();
    out.l_wsc = -2.0 * cfg.alpha * out.l1 - 2.0 * cfg.beta * out.l2 + cfg.alpha * cfg.alpha * out.l3 +
                cfg.beta * cfg.beta * out.l4 + 2.0 * cfg.alpha * cfg.beta * out.l5;
    out.uniform_mode = ww.world.uniform_prior();
    if (out.uniform_mode) {
        const double blend = cfg.alpha + cfg.beta / ww.world.c;
        out.l_wsc_uniform3 = -2.0 * cfg.alpha * out.l1 - 2.0 * cfg.beta * out.l2 + blend * blend * out.l3;
    }
    return out;
}

inline double matrix_factorization_objective(const NormalizedGraph& ng, const Mat& f) {
    require(f.rows() == ng.n, "matrix_factorization_objective: dimension mismatch");
    const Mat embedding = features_to_embedding(f, ng.degrees);
    return (ng.matrix - embedding * embedding.transpose()).squaredNorm();
}

// Analytic gradient of the population loss in the feature table:
// d/df_x = -4 sum_x' A_{x,x'} f_x' + 4 A_x sum_x' A_x' (f_x . f_x') f_x'.
inline Mat population_gradient(const Mat& f, const WeakWorld& ww, const RecoveryMap& s,
                               const PerturbationConfig& cfg) {
    require(f.rows() == ww.world.n, "population_gradient: dimension mismatch");
    const auto terms = detail::population_terms(ww, s, cfg);
    const Mat& w = terms.perturbed.weights;
    const Vec& deg = terms.perturbed.degrees;
    const Mat moment = f.transpose() * deg.asDiagonal() * f;  // d x d
    return -4.0 * (w * f) + 4.0 * (deg.asDiagonal() * (f * moment));
}

// ---------------------------------------------------------------------------
// Batch estimators.

struct BatchViews {
    Mat xq1, xq2;  // B_Q x d
    Mat xu1, xu2;  // B_U x d
};

namespace detail {

inline double trace_product(const Mat& a, const Mat& b) {
    return a.cwiseProduct(b).sum();  // tr(a b^T)
}

struct PairSums {
    double full = 0.0;
    double diagonal = 0.0;
    long count_full = 0;
    long count_offdiag = 0;
};

inline PairSums weighted_pair_sums(const Mat& weights, const Mat& values) {
    PairSums p;
    p.full = weights.cwiseProduct(values).sum();
    const long b = static_cast<long>(weights.rows());
    for (long i = 0; i < b; ++i) p.diagonal += weights(i, i) * values(i, i);
    p.count_full = b * b;
    p.count_offdiag = b * (b - 1);
    return p;
}

inline double normalized(const PairSums& p, EstimatorVariant variant, const char* what) {
    if (variant == EstimatorVariant::verbatim) return p.count_full > 0 ? p.full / p.count_full : 0.0;
    require(p.count_offdiag > 0, std::string(what) + ": U-statistic needs at least 2 samples");
    return (p.full - p.diagonal) / p.count_offdiag;
}

inline void check_views(const BatchViews& v) {
    require(v.xq1.rows() == v.xq2.rows() && v.xq1.cols() == v.xq2.cols(),
            "batch views: labeled view shapes differ");
    require(v.xu1.rows() == v.xu2.rows() && v.xu1.cols() == v.xu2.cols(),
            "batch views: unlabeled view shapes differ");
}

}  // namespace detail

// Uniform class distribution estimator. The Hadamard-product "norm" sums
// signed entries: approximate recoveries legitimately produce negative
// similarities and the population term it estimates is a signed sum.
inline double batch_loss_uniform(const BatchViews& views, const Mat& s_cols,
                                 const PerturbationConfig& cfg, int c,
                                 EstimatorVariant variant = EstimatorVariant::verbatim) {
    detail::check_views(views);
    validate_perturbation(cfg);
    const long bq = views.xq1.rows();
    const long bu = views.xu1.rows();
    require(bq + bu >= 1, "batch_loss_uniform: empty batch");
    require(cfg.beta == 0.0 || bq >= 1, "batch_loss_uniform: empty labeled batch with beta > 0");
    if (bq > 0)
        require(s_cols.cols() == bq, "batch_loss_uniform: s_cols must have one column per labeled sample");

    const double l1 = (detail::trace_product(views.xq1, views.xq2) +
                       detail::trace_product(views.xu1, views.xu2)) /
                      static_cast<double>(bq + bu);

    double l2 = 0.0;
    if (cfg.beta != 0.0) {
        const Mat sim = s_cols.transpose() * s_cols;       // B_Q x B_Q
        const Mat prod = views.xq1 * views.xq2.transpose();
        l2 = detail::normalized(detail::weighted_pair_sums(sim, prod), variant, "batch_loss_uniform L2");
    }

    Mat x1(bq + bu, views.xq1.cols());
    Mat x2(bq + bu, views.xq2.cols());
    x1 << views.xq1, views.xu1;
    x2 << views.xq2, views.xu2;
    const Mat cross = x1 * x2.transpose();
    const Mat cross_sq = cross.cwiseProduct(cross);
    const double l3 = detail::normalized(
        detail::weighted_pair_sums(Mat::Ones(bq + bu, bq + bu), cross_sq), variant,
        "batch_loss_uniform L3");

    const double blend = cfg.alpha + cfg.beta / c;
    return -2.0 * cfg.alpha * l1 - 2.0 * cfg.beta * l2 + blend * blend * l3;
}

// General (non-uniform prior) estimator with the S' reweighting. Entries of
// S'^T S' under the elementwise square root must be nonnegative; values in
// [-1e-12, 0) clamp to 0, anything lower is a domain error.
inline double batch_loss_general(const BatchViews& views, const Mat& s_cols, const Vec& prior,
                                 const PerturbationConfig& cfg,
                                 EstimatorVariant variant = EstimatorVariant::verbatim) {
    detail::check_views(views);
    validate_perturbation(cfg);
    const long bq = views.xq1.rows();
    const long bu = views.xu1.rows();
    require(bq + bu >= 1, "batch_loss_general: empty batch");
    require(cfg.beta == 0.0 || bq >= 1, "batch_loss_general: empty labeled batch with beta > 0");
    if (bq > 0)
        require(s_cols.cols() == bq && s_cols.rows() == prior.size(),
                "batch_loss_general: s_cols must be c x B_Q");

    const double l1 = (detail::trace_product(views.xq1, views.xq2) +
                       detail::trace_product(views.xu1, views.xu2)) /
                      static_cast<double>(bq + bu);

    double l2 = 0.0, l4 = 0.0, l5 = 0.0;
    Vec sprime;
    if (bq > 0) sprime = s_cols.transpose() * prior;  // S'(X), length B_Q

    const Mat prod_q = bq > 0 ? (views.xq1 * views.xq2.transpose()).eval() : Mat();
    if (cfg.beta != 0.0) {
        const Mat sim = s_cols.transpose() * s_cols;
        l2 = detail::normalized(detail::weighted_pair_sums(sim, prod_q), variant, "batch_loss_general L2");

        Mat weight(bq, bq);
        for (long i = 0; i < bq; ++i)
            for (long j = 0; j < bq; ++j) {
                const double w = sprime[i] * sprime[j];
                if (w < -1e-12)
                    throw NumericError("batch_loss_general: S' product at (" + std::to_string(i) +
                                       ", " + std::to_string(j) + ") is " +
                                       JsonWriter::format_double(w) + " < -1e-12");
                weight(i, j) = std::max(w, 0.0);
            }
        l4 = detail::normalized(detail::weighted_pair_sums(weight, prod_q.cwiseProduct(prod_q)),
                                variant, "batch_loss_general L4");
    }

    // block-diagonal L3: labeled and unlabeled pair sums share one normalizer
    double l3_full = 0.0, l3_diag = 0.0;
    long l3_count_full = 0, l3_count_off = 0;
    auto accumulate_l3 = [&](const Mat& a, const Mat& b) {
        const long rows = a.rows();
        if (rows == 0) return;
        const Mat cross = a * b.transpose();
        l3_full += cross.squaredNorm();
        for (long i = 0; i < rows; ++i) l3_diag += cross(i, i) * cross(i, i);
        l3_count_full += rows * rows;
        l3_count_off += rows * (rows - 1);
    };
    accumulate_l3(views.xq1, views.xq2);
    accumulate_l3(views.xu1, views.xu2);
    double l3 = 0.0;
    if (variant == EstimatorVariant::verbatim) {
        l3 = l3_count_full > 0 ? l3_full / l3_count_full : 0.0;
    } else {
        require(l3_count_off > 0, "batch_loss_general L3: U-statistic needs at least 2 samples");
        l3 = (l3_full - l3_diag) / l3_count_off;
    }

    if (cfg.alpha * cfg.beta != 0.0) {
        require(bq >= 1 && bu >= 1, "batch_loss_general: L5 needs labeled and unlabeled samples");
        Mat xq(2 * bq, views.xq1.cols());
        xq << views.xq1, views.xq2;
        Mat xu(2 * bu, views.xu1.cols());
        xu << views.xu1, views.xu2;
        Vec sdup(2 * bq);
        sdup << sprime, sprime;
        double sum = 0.0;
        const Mat cross = xq * xu.transpose();
        for (long i = 0; i < 2 * bq; ++i) {
            if (sdup[i] < -1e-12)
                throw NumericError("batch_loss_general: S' entry " + std::to_string(i % bq) +
                                   " is " + JsonWriter::format_double(sdup[i]) + " < -1e-12");
            const double w = std::max(sdup[i], 0.0);
            for (long j = 0; j < 2 * bu; ++j) sum += w * cross(i, j) * cross(i, j);
        }
        l5 = sum / (4.0 * static_cast<double>(bq) * static_cast<double>(bu));
    }

    return -2.0 * cfg.alpha * l1 - 2.0 * cfg.beta * l2 + cfg.alpha * cfg.alpha * l3 +
           cfg.beta * cfg.beta * l4 + 2.0 * cfg.alpha * cfg.beta * l5;
}

// ---------------------------------------------------------------------------
// Resampled batches over a weak world: labeled entries carry a weak draw and
// a recovery column; both views of a sample come from its instance's kernel.

struct SampledBatch {
    BatchViews views;
    Mat s_cols;               // c x B_Q
    std::vector<int> q1, q2;  // table row of each labeled view
    std::vector<int> u1, u2;  // table row of each unlabeled view
};

inline SampledBatch sample_batch(const WeakWorld& ww, const RecoveryMap& s, const Mat& f,
                                 int batch_q, int batch_u, Rng& rng) {
    const int d = static_cast<int>(f.cols());
    SampledBatch out;
    out.views.xq1.resize(batch_q, d);
    out.views.xq2.resize(batch_q, d);
    out.views.xu1.resize(batch_u, d);
    out.views.xu2.resize(batch_u, d);
    out.s_cols.resize(ww.world.c, batch_q);
    for (int i = 0; i < batch_q; ++i) {
        const int inst = rng.next_index(ww.world.instance_marginal);
        const int weak = rng.next_index(ww.weak_posterior.row(inst).transpose());
        const Vec kernel = ww.world.aug_kernel.row(inst).transpose();
        const int a1 = rng.next_index(kernel);
        const int a2 = rng.next_index(kernel);
        out.views.xq1.row(i) = f.row(a1);
        out.views.xq2.row(i) = f.row(a2);
        out.s_cols.col(i) = s.at(inst).col(weak);
        out.q1.push_back(a1);
        out.q2.push_back(a2);
    }
    for (int i = 0; i < batch_u; ++i) {
        const int inst = rng.next_index(ww.world.instance_marginal);
        const Vec kernel = ww.world.aug_kernel.row(inst).transpose();
        const int a1 = rng.next_index(kernel);
        const int a2 = rng.next_index(kernel);
        out.views.xu1.row(i) = f.row(a1);
        out.views.xu2.row(i) = f.row(a2);
        out.u1.push_back(a1);
        out.u2.push_back(a2);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trainer.

namespace detail {

// Analytic gradient of the verbatim batch estimators with respect to the
// feature table, scattered over the sampled rows.
inline Mat minibatch_gradient(const SampledBatch& batch, const Vec& prior,
                              const PerturbationConfig& cfg, int c, bool use_general, int n, int d) {
    const BatchViews& v = batch.views;
    const long bq = v.xq1.rows();
    const long bu = v.xu1.rows();
    const double b_total = static_cast<double>(bq + bu);

    Mat gq1 = Mat::Zero(bq, d), gq2 = Mat::Zero(bq, d);
    Mat gu1 = Mat::Zero(bu, d), gu2 = Mat::Zero(bu, d);

    // L1
    gq1 += (-2.0 * cfg.alpha / b_total) * v.xq2;
    gq2 += (-2.0 * cfg.alpha / b_total) * v.xq1;
    gu1 += (-2.0 * cfg.alpha / b_total) * v.xu2;
    gu2 += (-2.0 * cfg.alpha / b_total) * v.xu1;

    // L2
    if (cfg.beta != 0.0 && bq > 0) {
        const Mat sim = batch.s_cols.transpose() * batch.s_cols;
        const double scale = -2.0 * cfg.beta / static_cast<double>(bq * bq);
        gq1 += scale * (sim * v.xq2);
        gq2 += scale * (sim.transpose() * v.xq1);
    }

    if (!use_general) {
        // (alpha + beta/c)^2 L3 over the stacked batch
        Mat x1(bq + bu, d), x2(bq + bu, d);
        x1 << v.xq1, v.xu1;
        x2 << v.xq2, v.xu2;
        const Mat cross = x1 * x2.transpose();
        const double blend = cfg.alpha + cfg.beta / c;
        const double scale = 2.0 * blend * blend / (b_total * b_total);
        const Mat d1 = scale * (cross * x2);
        const Mat d2 = scale * (cross.transpose() * x1);
        gq1 += d1.topRows(bq);
        gu1 += d1.bottomRows(bu);
        gq2 += d2.topRows(bq);
        gu2 += d2.bottomRows(bu);
    } else {
        const Vec sprime = bq > 0 ? (batch.s_cols.transpose() * prior).eval() : Vec();
        // alpha^2 L3, block-diagonal with shared normalizer
        const double denom = static_cast<double>(bq * bq + bu * bu);
        if (denom > 0.0) {
            const double scale = 2.0 * cfg.alpha * cfg.alpha / denom;
            if (bq > 0) {
                const Mat cross = v.xq1 * v.xq2.transpose();
                gq1 += scale * (cross * v.xq2);
                gq2 += scale * (cross.transpose() * v.xq1);
            }
            if (bu > 0) {
                const Mat cross = v.xu1 * v.xu2.transpose();
                gu1 += scale * (cross * v.xu2);
                gu2 += scale * (cross.transpose() * v.xu1);
            }
        }
        // beta^2 L4
        if (cfg.beta != 0.0 && bq > 0) {
            const Mat cross = v.xq1 * v.xq2.transpose();
            Mat weighted(bq, bq);
            for (long i = 0; i < bq; ++i)
                for (long j = 0; j < bq; ++j)
                    weighted(i, j) = std::max(sprime[i] * sprime[j], 0.0) * cross(i, j);
            const double scale = 2.0 * cfg.beta * cfg.beta / static_cast<double>(bq * bq);
            gq1 += scale * (weighted * v.xq2);
            gq2 += scale * (weighted.transpose() * v.xq1);
        }
        // 2 alpha beta L5
        if (cfg.alpha * cfg.beta != 0.0 && bq > 0 && bu > 0) {
            Mat xq(2 * bq, d), xu(2 * bu, d);
            xq << v.xq1, v.xq2;
            xu << v.xu1, v.xu2;
            Vec sdup(2 * bq);
            sdup << sprime, sprime;
            for (long i = 0; i < 2 * bq; ++i) sdup[i] = std::max(sdup[i], 0.0);
            const Mat cross = xq * xu.transpose();
            const double scale = 2.0 * 2.0 * cfg.alpha * cfg.beta /
                                 (4.0 * static_cast<double>(bq) * static_cast<double>(bu));
            const Mat dq = scale * (sdup.asDiagonal() * (cross * xu));
            const Mat du = scale * (cross.transpose() * (sdup.asDiagonal() * xq));
            gq1 += dq.topRows(bq);
            gq2 += dq.bottomRows(bq);
            gu1 += du.topRows(bu);
            gu2 += du.bottomRows(bu);
        }
    }

    Mat grad = Mat::Zero(n, d);
    for (long i = 0; i < bq; ++i) {
        grad.row(batch.q1[static_cast<std::size_t>(i)]) += gq1.row(i);
        grad.row(batch.q2[static_cast<std::size_t>(i)]) += gq2.row(i);
    }
    for (long i = 0; i < bu; ++i) {
        grad.row(batch.u1[static_cast<std::size_t>(i)]) += gu1.row(i);
        grad.row(batch.u2[static_cast<std::size_t>(i)]) += gu2.row(i);
    }
    return grad;
}

}  // namespace detail

// Minimizes the contrastive loss over a free feature table. Population mode
// runs Armijo backtracking descent on the embedding F (objective
// ||A~ - F F^T||_F^2, reported as the loss up to the ||A~||_F^2 constant), so
// scaling the graph by eta > 0 leaves the trajectory of F literally
// unchanged and rescales f by 1/sqrt(eta). Minibatch mode takes fixed steps
// on the verbatim batch estimator.
inline TrainResult train_features(const WeakWorld& ww, const RecoveryMap& s,
                                  const PerturbationConfig& cfg, const TrainConfig& train) {
    require(train.step_size > 0.0, "train_features: step_size must be positive");
    require(train.max_steps >= 1, "train_features: max_steps must be >= 1");
    require(train.d >= 1, "train_features: d must be >= 1");

    const auto terms = detail::population_terms(ww, s, cfg);
    const NormalizedGraph ng = normalize(terms.perturbed);
    const double constant = ng.matrix.squaredNorm();

    TrainResult result;
    result.optimum_objective = psd_truncation_optimum(eigendecompose(ng), ng, train.d);

    const int n = ng.n;
    Mat embedding(n, train.d);
    Rng init_rng(train.seed, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < train.d; ++j)
            embedding(i, j) = init_rng.next_uniform(-train.init_scale, train.init_scale);

    if (!train.minibatch) {
        auto objective = [&](const Mat& f_emb) {
            return (ng.matrix - f_emb * f_emb.transpose()).squaredNorm();
        };
        auto gradient = [&](const Mat& f_emb) {
            return (4.0 * ((f_emb * f_emb.transpose() - ng.matrix) * f_emb)).eval();
        };
        double value = objective(embedding);
        Mat grad = gradient(embedding);
        result.loss_trajectory.push_back(value - constant);
        result.grad_norms.push_back(grad.norm());
        for (int step = 0; step < train.max_steps; ++step) {
            if (value - constant > 1e12)
                throw NumericError("train_features: loss diverged at step " + std::to_string(step) +
                                   " (value " + JsonWriter::format_double(value - constant) + ")");
            const double grad_norm = grad.norm();
            if (grad_norm < 1e-8 || value - result.optimum_objective <= 1e-9) {
                result.converged = true;
                break;
            }
            double t = train.step_size;
            double candidate_value = 0.0;
            Mat candidate;
            bool accepted = false;
            for (int half = 0; half < 60; ++half) {
                candidate = embedding - t * grad;
                candidate_value = objective(candidate);
                if (candidate_value <= value - 1e-4 * t * grad_norm * grad_norm) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) {  // descent direction exhausted at machine precision
                result.converged = value - result.optimum_objective <= 1e-9;
                break;
            }
            embedding = candidate;
            value = candidate_value;
            grad = gradient(embedding);
            result.steps_used = step + 1;
            result.loss_trajectory.push_back(value - constant);
            result.grad_norms.push_back(grad.norm());
        }
        if (!result.converged)
            result.converged = grad.norm() < 1e-8 || value - result.optimum_objective <= 1e-9;
        result.features = embedding_to_features(embedding, ng.degrees);
        return result;
    }

    // minibatch: fixed-step descent on the feature table
    Mat features = embedding_to_features(embedding, ng.degrees);
    const bool use_general = train.estimator == BatchEstimator::general ||
                             (train.estimator == BatchEstimator::automatic && !ww.world.uniform_prior());
    for (int step = 0; step < train.max_steps; ++step) {
        Rng rng(train.seed, static_cast<std::uint64_t>(step) + 1);
        const SampledBatch batch = sample_batch(ww, s, features, train.batch_q, train.batch_u, rng);
        const double batch_loss =
            use_general
                ? batch_loss_general(batch.views, batch.s_cols, ww.world.class_prior, cfg)
                : batch_loss_uniform(batch.views, batch.s_cols, cfg, ww.world.c);
        result.loss_trajectory.push_back(batch_loss);
        if (std::abs(batch_loss) > 1e12)
            throw NumericError("train_features: minibatch loss diverged at step " +
                               std::to_string(step));
        const Mat grad = detail::minibatch_gradient(batch, ww.world.class_prior, cfg, ww.world.c,
                                                    use_general, n, train.d);
        result.grad_norms.push_back(grad.norm());
        features -= train.step_size * grad;
        result.steps_used = step + 1;
    }
    result.features = features;
    return result;
}

// ---------------------------------------------------------------------------

inline std::string loss_to_json(const LossBreakdown& b) {
    JsonWriter out;
    out.begin_object();
    out.field("l1", b.l1);
    out.field("l2", b.l2);
    out.field("l3", b.l3);
    out.field("l4", b.l4);
    out.field("l5", b.l5);
    out.field("l_wsc", b.l_wsc);
    out.field("uniform_mode", b.uniform_mode);
    if (b.uniform_mode) out.field("l_wsc_uniform3", b.l_wsc_uniform3);
    out.field("alpha", b.alpha);
    out.field("beta", b.beta);
    out.end_object();
    return out.str();
}

inline std::string trajectory_to_csv(const TrainResult& r) {
    std::string out = "step,loss,grad_norm\n";
    for (std::size_t i = 0; i < r.loss_trajectory.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += JsonWriter::format_double(r.loss_trajectory[i]);
        out += ',';
        out += i < r.grad_norms.size() ? JsonWriter::format_double(r.grad_norms[i]) : std::string("");
        out += '\n';
    }
    return out;
}

}  // namespace wsc
