#pragma once

// Hill-climbing refinement of predicted (umin, umax) and the exhaustive grid
// search it is measured against.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "greenroute/eeroute.hpp"
#include "greenroute/error.hpp"
#include "greenroute/learn/metrics.hpp"
#include "greenroute/netmodel.hpp"
#include "greenroute/parallel.hpp"
#include "greenroute/paths.hpp"
#include "greenroute/text.hpp"
#include "greenroute/traffic.hpp"

namespace greenroute {

/// Energy saving as a function of (umin, umax), with a call counter.
/// Copies share the counter. Calls are thread-safe when the wrapped function is.
class EeEvaluator {
public:
    using Function = std::function<double(double, double)>;

    explicit EeEvaluator(Function fn) : fn_(std::move(fn)), count_(std::make_shared<std::atomic<std::size_t>>(0)) {}

    /// Energy saving of route_mept on a fixed topology and snapshot.
    static EeEvaluator for_routing(const Topology& t, const TrafficSnapshot& s, std::size_t k = kDefaultCandidatePaths) {
        return for_routing(t, s, std::make_shared<const CandidateTable>(t, k));
    }

    static EeEvaluator for_routing(const Topology& t, const TrafficSnapshot& s,
                                   std::shared_ptr<const CandidateTable> table) {
        validate_snapshot(s, t);
        auto topo = std::make_shared<const Topology>(t);
        auto snap = std::make_shared<const TrafficSnapshot>(s);
        return EeEvaluator([topo, snap, table](double umin, double umax) {
            return route_mept(*topo, *snap, UtilityInterval{umin, umax}, *table).energy_saving;
        });
    }

    double operator()(double umin, double umax) const {
        count_->fetch_add(1, std::memory_order_relaxed);
        return fn_(umin, umax);
    }

    std::size_t evaluations() const { return count_->load(); }

private:
    Function fn_;
    std::shared_ptr<std::atomic<std::size_t>> count_;
};

struct TuneResult {
    double umin = 0.0;
    double umax = 0.0;
    double ee = 0.0;
    std::size_t evaluations = 0;
    double speedup = 0.0;  // 100 / evaluations
};

struct RefineOptions {
    double alpha = 1.0;
    double beta = 0.0;
    std::size_t max_moves = 1000;
};

/// Two-phase hill climb from a predicted (umin0, umax0).
///
/// Phase 1 compares EE at umin - alpha and umin + alpha, moves umin toward
/// the larger (downward on ties) and stops once a move changes EE by at most
/// beta. A neighbour outside [0, umax] is never evaluated and counts as the
/// worse side. Moving back onto an already visited umin ends the phase at the
/// best visited umin.
///
/// Phase 2 lowers umax by alpha while EE does not drop and umax stays >= umin.
///
/// Each distinct (umin, umax) is evaluated once per call; `evaluations` is
/// the number of distinct points.
inline TuneResult refine(const EeEvaluator& ee, double umin0, double umax0, const RefineOptions& opt = {}) {
    if (!(umin0 >= 0.0 && umin0 <= umax0 && umax0 <= 100.0))
        throw ValidationError("refine start must satisfy 0 <= umin <= umax <= 100");
    if (!(opt.alpha > 0.0)) throw ValidationError("refine step alpha must be > 0");
    if (!(opt.beta >= 0.0)) throw ValidationError("refine threshold beta must be >= 0");

    const auto start_count = ee.evaluations();
    std::map<std::pair<double, double>, double> seen;
    auto eval = [&](double u, double v) {
        const auto [it, fresh] = seen.try_emplace({u, v}, 0.0);
        if (fresh) it->second = ee(u, v);
        return it->second;
    };
    std::size_t moves = 0;
    auto count_move = [&] {
        if (++moves > opt.max_moves)
            throw ConvergenceError("refine exceeded " + std::to_string(opt.max_moves) + " moves");
    };

    constexpr double kOut = -std::numeric_limits<double>::infinity();
    double u = umin0;
    double v = umax0;
    double cur = eval(u, v);
    std::vector<std::pair<double, double>> visited{{u, cur}};  // (umin, EE) in visit order

    while (true) {
        const double down = u - opt.alpha;
        const double up = u + opt.alpha;
        const double prev = down >= 0.0 ? eval(down, v) : kOut;
        const double next = up <= v ? eval(up, v) : kOut;
        if (prev == kOut && next == kOut) break;
        const double target = prev < next ? up : down;
        count_move();

        bool revisit = false;
        for (const auto& [vu, _] : visited) revisit = revisit || vu == target;
        if (revisit) {
            auto best = visited.front();
            for (const auto& p : visited)
                if (p.second > best.second) best = p;
            u = best.first;
            cur = best.second;
            break;
        }

        u = target;
        const double fresh = eval(u, v);
        visited.emplace_back(u, fresh);
        const bool settled = std::abs(cur - fresh) <= opt.beta;
        cur = fresh;
        if (settled) break;
    }

    while (v - opt.alpha >= u) {
        const double lower = eval(u, v - opt.alpha);
        if (lower < cur) break;
        count_move();
        v -= opt.alpha;
        cur = lower;
    }

    TuneResult r{u, v, cur, ee.evaluations() - start_count, 0.0};
    r.speedup = learn::speedup(r.evaluations);
    return r;
}

/// {0, step, 2 step, ...} up to 100, with 100 appended when step does not divide it.
inline std::vector<double> parameter_grid(double step) {
    if (!(step > 0.0)) throw ValidationError("grid step must be > 0");
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        const double g = static_cast<double>(i) * step;
        if (g > 100.0 + 1e-9) break;
        grid.push_back(std::min(g, 100.0));
    }
    if (grid.back() < 100.0) grid.push_back(100.0);
    return grid;
}

/// Exhaustive sweep of the (umin <= umax) grid. Ties go to the smallest umin, then the smallest umax.
inline TuneResult brute_force_optimal(const EeEvaluator& ee, double step = 1.0) {
    const auto grid = parameter_grid(step);
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i; j < grid.size(); ++j) points.emplace_back(grid[i], grid[j]);

    const auto start_count = ee.evaluations();
    std::vector<double> values(points.size());
    parallel_for(points.size(), [&](std::size_t p) { values[p] = ee(points[p].first, points[p].second); });

    std::size_t best = 0;
    for (std::size_t p = 1; p < points.size(); ++p)
        if (values[p] > values[best]) best = p;
    TuneResult r{points[best].first, points[best].second, values[best], ee.evaluations() - start_count, 0.0};
    r.speedup = learn::speedup(r.evaluations);
    return r;
}

struct Label {
    std::string timestamp;
    FeatureVector features;
    double umin = 0.0;
    double umax = 0.0;
    double ee = 0.0;
};

/// Brute-force optimal (umin, umax) for every snapshot, with its feature vector.
inline std::vector<Label> label_snapshots(const Topology& t, const std::vector<TrafficSnapshot>& snapshots,
                                          double step = 1.0, std::size_t k = kDefaultCandidatePaths) {
    auto table = std::make_shared<const CandidateTable>(t, k);
    std::vector<Label> labels;
    labels.reserve(snapshots.size());
    for (const auto& s : snapshots) {
        const auto best = brute_force_optimal(EeEvaluator::for_routing(t, s, table), step);
        labels.push_back(Label{s.timestamp, to_feature_vector(s, t), best.umin, best.umax, best.ee});
    }
    return labels;
}

}  // namespace greenroute
