#pragma once

#include <Eigen/Cholesky>

#include <algorithm>
#include <string>
#include <vector>

#include "wsc/common.hpp"
#include "wsc/json_io.hpp"
#include "wsc/world.hpp"

namespace wsc {

struct Classifier {
    Mat weights;  // d x c
    double ridge = 0.0;
};

struct ProbeResult {
    double epsilon = 1.0;  // natural-data error of the fitted head (upper bound on the probe min)
    std::vector<int> per_instance_prediction;   // h~ over natural instances
    std::vector<int> per_augmented_prediction;  // h over augmented points
    Mat confusion;                              // c x c, probability mass, rows = true class
};

// Weighted ridge least squares onto one-hot class targets:
// B minimizes sum_{x~,y,x} P(x~,y) A(x|x~) ||e_y - B^T f_x||^2 + ridge ||B||_F^2.
inline Classifier fit_linear_probe(const Mat& f, const WorldModel& world, double ridge) {
    require(f.rows() == world.n, "fit_linear_probe: features must have one row per augmented point");
    require(ridge >= 0.0, "fit_linear_probe: ridge must be >= 0");
    const int d = static_cast<int>(f.cols());

    // joint mass of (augmented point, class): K^T joint
    const Mat point_class = world.aug_kernel.transpose() * world.joint;  // n x c
    const Mat gram = f.transpose() * world.aug_marginal.asDiagonal() * f +
                     ridge * Mat::Identity(d, d);
    const Mat rhs = f.transpose() * point_class;

    Eigen::LDLT<Mat> solver(gram);
    if (solver.info() != Eigen::Success || (gram * solver.solve(rhs) - rhs).cwiseAbs().maxCoeff() >
                                               1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
        throw NumericError("fit_linear_probe: singular weighted Gram matrix; use a nonzero ridge");

    Classifier clf;
    clf.ridge = ridge;
    clf.weights = solver.solve(rhs);
    return clf;
}

namespace detail {

inline int argmax_lowest(const Vec& scores) {
    int best = 0;
    for (int i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;  // ties keep the lowest index
    return best;
}

}  // namespace detail

// h(x) = argmax B^T f_x; h~(x~) ensembles h over the augmentation kernel;
// epsilon is the exact natural-data error mass. Argmax ties break to the
// lowest class index.
inline ProbeResult ensemble_error(const Classifier& clf, const Mat& f, const WorldModel& world) {
    require(f.rows() == world.n, "ensemble_error: features must have one row per augmented point");
    require(clf.weights.rows() == f.cols(), "ensemble_error: classifier dimension mismatch");
    const int c = world.c;

    ProbeResult result;
    const Mat scores = f * clf.weights;  // n x c
    result.per_augmented_prediction.resize(static_cast<std::size_t>(world.n));
    for (int x = 0; x < world.n; ++x)
        result.per_augmented_prediction[static_cast<std::size_t>(x)] =
            detail::argmax_lowest(scores.row(x).transpose());

    result.per_instance_prediction.resize(static_cast<std::size_t>(world.m));
    result.confusion = Mat::Zero(c, c);
    double error = 0.0;
    for (int i = 0; i < world.m; ++i) {
        Vec votes = Vec::Zero(c);
        for (int x = 0; x < world.n; ++x)
            votes[result.per_augmented_prediction[static_cast<std::size_t>(x)]] +=
                world.aug_kernel(i, x);
        const int predicted = detail::argmax_lowest(votes);
        result.per_instance_prediction[static_cast<std::size_t>(i)] = predicted;
        for (int y = 0; y < c; ++y) {
            result.confusion(y, predicted) += world.joint(i, y);
            if (predicted != y) error += world.joint(i, y);
        }
    }
    result.epsilon = error;
    return result;
}

inline std::string probe_result_to_json(const ProbeResult& r) {
    JsonWriter out;
    out.begin_object();
    out.field("epsilon", r.epsilon);
    out.key("per_instance_prediction").begin_array();
    for (int p : r.per_instance_prediction) out.value(p);
    out.end_array();
    out.key("per_augmented_prediction").begin_array();
    for (int p : r.per_augmented_prediction) out.value(p);
    out.end_array();
    out.field("confusion", r.confusion);
    out.end_object();
    return out.str();
}

inline std::string confusion_to_csv(const ProbeResult& r) {
    std::string out = "true_class";
    const int c = static_cast<int>(r.confusion.rows());
    for (int j = 0; j < c; ++j) out += ",pred_" + std::to_string(j);
    out += "\n";
    for (int i = 0; i < c; ++i) {
        out += std::to_string(i);
        for (int j = 0; j < c; ++j) {
            out += ',';
            out += JsonWriter::format_double(r.confusion(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace wsc
