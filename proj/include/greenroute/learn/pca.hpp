#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "greenroute/error.hpp"
#include "greenroute/learn/eigen_sym.hpp"
#include "greenroute/traffic.hpp"

namespace greenroute::learn {

struct PcaModel {
    Eigen::VectorXd mean;         // length n
    Eigen::VectorXd eigenvalues;  // descending, length n
    Eigen::MatrixXd components;   // n x n, orthonormal columns
    std::size_t k = 0;
    bool degenerate = false;      // every eigenvalue is zero (all rows identical)

    Eigen::Index features() const { return mean.size(); }

    /// W: the first k principal directions, n x k.
    Eigen::MatrixXd projection() const { return components.leftCols(static_cast<Eigen::Index>(k)); }

    /// Same decomposition keeping a different number of components.
    PcaModel with_k(std::size_t new_k) const {
        if (new_k < 1 || new_k > static_cast<std::size_t>(features()))
            throw ValidationError("k = " + std::to_string(new_k) + " outside [1, " + std::to_string(features()) + "]");
        PcaModel m = *this;
        m.k = new_k;
        return m;
    }
};

/// (1/d) (X - mean)^T (X - mean) with rows as samples.
inline Eigen::MatrixXd covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean) {
    const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
    return (centered.transpose() * centered) / static_cast<double>(x.rows());
}

inline PcaModel pca_fit(const Eigen::MatrixXd& x, std::size_t k) {
    if (x.rows() < 2) throw ValidationError("PCA needs at least 2 samples");
    if (k < 1 || k > static_cast<std::size_t>(x.cols()))
        throw ValidationError("k = " + std::to_string(k) + " outside [1, " + std::to_string(x.cols()) + "]");
    PcaModel m;
    m.mean = x.colwise().mean().transpose();
    auto eig = eig_sym(covariance(x, m.mean));
    m.eigenvalues = std::move(eig.values);
    m.components = std::move(eig.vectors);
    m.k = k;
    m.degenerate = m.eigenvalues.cwiseAbs().maxCoeff() == 0.0;
    return m;
}

inline PcaModel pca_fit(const FeatureMatrix& x, std::size_t k) { return pca_fit(x.values, k); }

/// Rows of (x - mean) W.
inline Eigen::MatrixXd pca_project(const PcaModel& m, const Eigen::MatrixXd& x) {
    if (x.cols() != m.features())
        throw ValidationError("feature length " + std::to_string(x.cols()) + " does not match model length " +
                              std::to_string(m.features()));
    return (x.rowwise() - m.mean.transpose()) * m.projection();
}

inline Eigen::VectorXd pca_project(const PcaModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.features())
        throw ValidationError("feature length " + std::to_string(x.size()) + " does not match model length " +
                              std::to_string(m.features()));
    return m.projection().transpose() * (x - m.mean);
}

/// Maps reduced coordinates back into feature space: z W^T + mean.
inline Eigen::VectorXd pca_reconstruct(const PcaModel& m, const Eigen::VectorXd& z) {
    return m.projection() * z + m.mean;
}

/// Percent of the spectrum carried by the first k eigenvalues; 0 when the spectrum sums to 0.
inline double variance_retained(const Eigen::VectorXd& eigenvalues, std::size_t k) {
    if (k > static_cast<std::size_t>(eigenvalues.size())) throw ValidationError("k exceeds eigenvalue count");
    const double total = eigenvalues.sum();
    if (total == 0.0) return 0.0;
    return 100.0 * eigenvalues.head(static_cast<Eigen::Index>(k)).sum() / total;
}

}  // namespace greenroute::learn
