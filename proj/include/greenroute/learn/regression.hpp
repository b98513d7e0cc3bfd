#pragma once

#include <algorithm>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "greenroute/error.hpp"

namespace greenroute::learn {

inline constexpr double kRidge = 1e-8;

enum class Target { Umin, Umax, UminGivenUmax, UmaxGivenUmin };

inline const char* target_name(Target t) {
    switch (t) {
        case Target::Umin: return "umin";
        case Target::Umax: return "umax";
        case Target::UminGivenUmax: return "umin_given_umax";
        case Target::UmaxGivenUmin: return "umax_given_umin";
    }
    return "?";
}

inline Target parse_target(const std::string& s) {
    for (auto t : {Target::Umin, Target::Umax, Target::UminGivenUmax, Target::UmaxGivenUmin})
        if (s == target_name(t)) return t;
    throw ValidationError("unknown regression target '" + s + "'");
}

inline bool is_conditional(Target t) { return t == Target::UminGivenUmax || t == Target::UmaxGivenUmin; }

struct RegressionModel {
    Eigen::VectorXd weights;  // bias first, then one weight per input column
    Target target = Target::Umax;
    bool ridge = false;       // design matrix was rank deficient

    Eigen::Index inputs() const { return weights.size() - 1; }
};

inline Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& z) {
    Eigen::MatrixXd a(z.rows(), z.cols() + 1);
    a.col(0).setOnes();
    a.rightCols(z.cols()) = z;
    return a;
}

/// Least squares fit of y ~ [1 Z] w. Full-rank systems go through
/// column-pivoted Householder QR; rank-deficient ones fall back to
/// (A^T A + 1e-8 I) w = A^T y.
inline RegressionModel regress_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, Target target = Target::Umax) {
    if (z.rows() != y.size()) throw ValidationError("regression: row count and label count differ");
    if (z.rows() == 0) throw ValidationError("regression: no samples");
    if (!z.allFinite() || !y.allFinite()) throw ValidationError("regression: non-finite input");

    const Eigen::MatrixXd a = design_matrix(z);
    RegressionModel m;
    m.target = target;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() == a.cols()) {
        m.weights = qr.solve(y);
    } else {
        Eigen::MatrixXd normal = a.transpose() * a;
        normal.diagonal().array() += kRidge;
        m.weights = normal.ldlt().solve(a.transpose() * y);
        m.ridge = true;
    }
    if (!m.weights.allFinite()) throw ValidationError("regression produced non-finite weights");
    return m;
}

inline double regress_raw(const RegressionModel& m, const Eigen::VectorXd& z) {
    if (z.size() != m.inputs())
        throw ValidationError("regression input length " + std::to_string(z.size()) + ", model expects " +
                              std::to_string(m.inputs()));
    return m.weights(0) + m.weights.tail(m.inputs()).dot(z);
}

/// Prediction clamped to the utility range [0, 100].
inline double regress_predict(const RegressionModel& m, const Eigen::VectorXd& z) {
    return std::clamp(regress_raw(m, z), 0.0, 100.0);
}

}  // namespace greenroute::learn
