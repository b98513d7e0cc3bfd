#pragma once

// Symmetric eigendecomposition by cyclic Jacobi rotations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "greenroute/error.hpp"

namespace greenroute::learn {

struct EigenDecomposition {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // column i pairs with values(i)
    int sweeps = 0;
};

struct JacobiOptions {
    double relative_tolerance = 1e-12;
    int max_sweeps = 100;
    double symmetry_tolerance = 1e-9;
};

namespace detail {

inline double off_diagonal_norm(const Eigen::MatrixXd& a) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != j) sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
}

/// Flips v so that its largest-magnitude entry (first one on near-ties) is positive.
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    if (v.size() == 0) return;
    const double peak = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= peak * (1.0 - 1e-9)) {
            if (v(i) < 0.0) v = -v;
            return;
        }
    }
}

}  // namespace detail

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue, with
/// orthonormal eigenvectors whose largest-magnitude entry is positive.
///
/// Iterates full cyclic sweeps until the off-diagonal Frobenius norm drops
/// below relative_tolerance * max(|trace|, ||C||_F).
inline EigenDecomposition eig_sym(const Eigen::MatrixXd& c, const JacobiOptions& opt = {}) {
    if (c.rows() != c.cols()) throw ValidationError("eig_sym needs a square matrix");
    const Eigen::Index n = c.rows();
    const double scale_ref = std::max(1.0, c.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(c(i, j) - c(j, i)) > opt.symmetry_tolerance * scale_ref)
                throw ValidationError("eig_sym input is not symmetric at (" + std::to_string(i) + ", " +
                                      std::to_string(j) + ")");

    Eigen::MatrixXd a = 0.5 * (c + c.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double threshold = opt.relative_tolerance * std::max(std::abs(a.trace()), a.norm());

    int sweep = 0;
    while (detail::off_diagonal_norm(a) > threshold) {
        if (sweep == opt.max_sweeps)
            throw ConvergenceError("Jacobi eigensolver did not converge in " + std::to_string(opt.max_sweeps) +
                                   " sweeps");
        ++sweep;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cs = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * cs;

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (Eigen::Index r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = cs * arp - sn * arq;
                    a(r, q) = a(q, r) = sn * arp + cs * arq;
                }
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = cs * vrp - sn * vrq;
                    v(r, q) = sn * vrp + cs * vrq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.sweeps = sweep;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = order[static_cast<std::size_t>(i)];
        out.values(i) = a(src, src);
        out.vectors.col(i) = v.col(src);
        detail::fix_sign(out.vectors.col(i));
    }
    return out;
}

}  // namespace greenroute::learn
