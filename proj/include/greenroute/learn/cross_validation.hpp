#pragma once

// k-fold cross-validation over the number of retained principal components.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "greenroute/error.hpp"
#include "greenroute/learn/eigen_sym.hpp"
#include "greenroute/learn/metrics.hpp"
#include "greenroute/learn/pca.hpp"
#include "greenroute/learn/regression.hpp"
#include "greenroute/parallel.hpp"
#include "greenroute/random.hpp"

namespace greenroute::learn {

inline constexpr std::size_t kDefaultFolds = 10;

struct CvRow {
    std::size_t k = 0;
    double size_reduction = 0.0;     // percent
    double accuracy = 0.0;           // mean held-out accuracy, percent
    double variance_retained = 0.0;  // percent, from the PCA of all samples
};

struct CvReport {
    std::size_t features = 0;
    std::vector<CvRow> rows;
    std::size_t chosen_k = 0;
};

/// Fold id of every sample: a seeded shuffle dealt round-robin, so fold sizes differ by at most one.
inline std::vector<std::size_t> fold_assignment(std::size_t samples, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw ValidationError("need at least 2 folds");
    if (samples < folds)
        throw ValidationError("cross-validation needs at least " + std::to_string(folds) + " samples, got " +
                              std::to_string(samples));
    std::vector<std::size_t> order(samples);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<std::size_t> fold(samples);
    for (std::size_t pos = 0; pos < samples; ++pos) fold[order[pos]] = pos % folds;
    return fold;
}

/// Every k up to 60 features; beyond that 1 plus every 2% of n.
inline std::vector<std::size_t> default_k_grid(std::size_t n) {
    std::vector<std::size_t> grid;
    if (n <= 60) {
        for (std::size_t k = 1; k <= n; ++k) grid.push_back(k);
        return grid;
    }
    grid.push_back(1);
    for (int pct = 2; pct <= 100; pct += 2) {
        const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(n * pct / 100.0)));
        if (k != grid.back()) grid.push_back(k);
    }
    return grid;
}

/// Smallest k within one point of the best accuracy, widened by 5% of n and
/// rounded up to the next grid value when there is one (capped at n).
inline std::size_t choose_k(const std::vector<CvRow>& rows, std::size_t n) {
    if (rows.empty()) throw ValidationError("empty cross-validation grid");
    double best = rows.front().accuracy;
    for (const auto& r : rows) best = std::max(best, r.accuracy);
    std::size_t k0 = n;
    for (const auto& r : rows)
        if (r.accuracy >= best - 1.0) k0 = std::min(k0, r.k);
    const std::size_t want = std::min(n, k0 + n / 20);
    std::size_t on_grid = 0;
    for (const auto& r : rows)
        if (r.k >= want && (on_grid == 0 || r.k < on_grid)) on_grid = r.k;
    return on_grid ? on_grid : want;
}

/// For each k in the grid: fit PCA + regression on all folds but one, score
/// prediction_accuracy on the held-out fold, and average over the rotations.
/// Each fold decomposes its covariance once and slices it for every k.
inline CvReport cross_validate_k(const Eigen::MatrixXd& x, const Eigen::VectorXd& labels,
                                 std::vector<std::size_t> k_grid, std::size_t folds, std::uint64_t seed,
                                 double eps = kDefaultEpsilon) {
    const auto d = static_cast<std::size_t>(x.rows());
    const auto n = static_cast<std::size_t>(x.cols());
    if (labels.size() != x.rows()) throw ValidationError("label count does not match sample count");
    if (k_grid.empty()) k_grid = default_k_grid(n);
    for (auto k : k_grid)
        if (k < 1 || k > n) throw ValidationError("k grid value " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");

    const auto fold_of = fold_assignment(d, folds, seed);

    // accuracy_sum[f][g]: summed held-out accuracy of fold f at grid entry g
    std::vector<std::vector<double>> fold_sum(folds, std::vector<double>(k_grid.size(), 0.0));
    std::vector<std::size_t> fold_size(folds, 0);

    parallel_for(folds, [&](std::size_t f) {
        std::vector<Eigen::Index> train, test;
        for (std::size_t i = 0; i < d; ++i) (fold_of[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
        const Eigen::MatrixXd xtr = x(train, Eigen::all);
        const Eigen::MatrixXd xte = x(test, Eigen::all);
        const Eigen::VectorXd ytr = labels(train);
        const Eigen::VectorXd yte = labels(test);

        const auto full = pca_fit(xtr, n);
        const Eigen::MatrixXd ztr_all = (xtr.rowwise() - full.mean.transpose()) * full.components;
        const Eigen::MatrixXd zte_all = (xte.rowwise() - full.mean.transpose()) * full.components;

        for (std::size_t g = 0; g < k_grid.size(); ++g) {
            const auto k = static_cast<Eigen::Index>(k_grid[g]);
            const auto model = regress_fit(ztr_all.leftCols(k), ytr);
            double sum = 0.0;
            for (Eigen::Index i = 0; i < zte_all.rows(); ++i)
                sum += prediction_accuracy(yte(i), regress_predict(model, zte_all.row(i).head(k).transpose()), eps);
            fold_sum[f][g] = sum;
        }
        fold_size[f] = test.size();
    });

    const auto all = pca_fit(x, n);
    CvReport report;
    report.features = n;
    for (std::size_t g = 0; g < k_grid.size(); ++g) {
        double mean_acc = 0.0;
        for (std::size_t f = 0; f < folds; ++f) mean_acc += fold_sum[f][g] / static_cast<double>(fold_size[f]);
        mean_acc /= static_cast<double>(folds);
        report.rows.push_back(CvRow{k_grid[g], size_reduction(k_grid[g], n), mean_acc,
                                    variance_retained(all.eigenvalues, k_grid[g])});
    }
    report.chosen_k = choose_k(report.rows, n);
    return report;
}

}  // namespace greenroute::learn
