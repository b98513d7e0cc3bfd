#pragma once

// PCA-reduced linear predictor of one utility parameter. Conditional targets
// append the known companion parameter as one extra column after projection.

#include <cstddef>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "greenroute/error.hpp"
#include "greenroute/learn/pca.hpp"
#include "greenroute/learn/regression.hpp"

namespace greenroute::learn {

struct Predictor {
    PcaModel pca;
    RegressionModel regression;

    Target target() const { return regression.target; }
};

namespace detail {

inline Eigen::MatrixXd with_known_column(const Eigen::MatrixXd& z, const Eigen::VectorXd& known) {
    Eigen::MatrixXd out(z.rows(), z.cols() + 1);
    out.leftCols(z.cols()) = z;
    out.col(z.cols()) = known;
    return out;
}

}  // namespace detail

/// `known` holds the companion parameter per row and is required exactly for conditional targets.
inline Predictor train_predictor(const Eigen::MatrixXd& x, const Eigen::VectorXd& labels, std::size_t k, Target target,
                                 const std::optional<Eigen::VectorXd>& known = std::nullopt) {
    if (is_conditional(target) != known.has_value())
        throw ValidationError(std::string("target ") + target_name(target) +
                              (known ? " takes no known parameter" : " needs the known parameter column"));
    if (known && known->size() != x.rows()) throw ValidationError("known parameter column length mismatch");
    Predictor p;
    p.pca = pca_fit(x, k);
    Eigen::MatrixXd z = pca_project(p.pca, x);
    if (known) z = detail::with_known_column(z, *known);
    p.regression = regress_fit(z, labels, target);
    return p;
}

inline double predict(const Predictor& p, const Eigen::VectorXd& features, std::optional<double> known = std::nullopt) {
    if (is_conditional(p.target()) != known.has_value())
        throw ValidationError(std::string("target ") + target_name(p.target()) +
                              (known ? " takes no known parameter" : " needs the known parameter"));
    Eigen::VectorXd z = pca_project(p.pca, features);
    if (known) {
        z.conservativeResize(z.size() + 1);
        z(z.size() - 1) = *known;
    }
    return regress_predict(p.regression, z);
}

}  // namespace greenroute::learn
