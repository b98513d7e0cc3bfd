#include <gtest/gtest.h>

#include <cmath>
#include <mutex>
#include <set>
#include <utility>

#include "greenroute/eeroute.hpp"
#include "greenroute/random.hpp"
#include "greenroute/tune.hpp"
#include "test_util.hpp"

namespace greenroute {
namespace {

EeEvaluator pyramid() {
    return EeEvaluator([](double u, double v) { return 100.0 - std::abs(u - 30.0) - std::abs(v - 70.0); });
}

TEST(Refine, ClosedFormLandscape) {
    const auto ee = pyramid();
    const auto r = refine(ee, 25, 80);
    EXPECT_EQ(r.umin, 30.0);
    EXPECT_EQ(r.umax, 70.0);
    EXPECT_EQ(r.ee, 100.0);
    // umin 24..31 in the first phase, umax 79..69 in the second.
    EXPECT_EQ(r.evaluations, 19u);
    EXPECT_DOUBLE_EQ(r.speedup, 100.0 / 19.0);
    EXPECT_EQ(ee.evaluations(), 19u);
}

TEST(Refine, StartAtOptimum) {
    const auto r = refine(pyramid(), 30, 70);
    EXPECT_EQ(r.umin, 30.0);
    EXPECT_EQ(r.umax, 70.0);
    EXPECT_EQ(r.ee, 100.0);
    EXPECT_EQ(r.evaluations, 5u);
}

TEST(Refine, BetaStopsEarly) {
    // Every move changes EE by 1; beta = 1 stops after the first.
    const auto r = refine(pyramid(), 25, 70, RefineOptions{1.0, 1.0, 1000});
    EXPECT_EQ(r.umin, 26.0);
    EXPECT_EQ(r.umax, 70.0);
}

TEST(Refine, LargerAlpha) {
    const auto r = refine(pyramid(), 20, 90, RefineOptions{5.0, 0.0, 1000});
    EXPECT_EQ(r.umin, 30.0);
    EXPECT_EQ(r.umax, 70.0);
}

TEST(Refine, BoundariesAreNotEvaluated) {
    std::set<std::pair<double, double>> points;
    EeEvaluator ee([&](double u, double v) {
        points.emplace(u, v);
        return -u - v;
    });
    const auto r = refine(ee, 0, 2);
    EXPECT_EQ(r.umin, 0.0);
    EXPECT_EQ(r.umax, 0.0);
    for (const auto& [u, v] : points) {
        EXPECT_GE(u, 0.0);
        EXPECT_LE(u, v);
        EXPECT_LE(v, 100.0);
    }
}

TEST(Refine, SpeedupTimesEvaluationsIsHundred) {
    Rng rng(6);
    for (int i = 0; i < 50; ++i) {
        const double a = rng.uniform(5, 40);
        const double b = rng.uniform(50, 95);
        EeEvaluator ee([&](double u, double v) { return 100.0 - (u - a) * (u - a) / 10.0 - std::abs(v - b); });
        const double u0 = std::floor(rng.uniform(0, 45));
        const double v0 = std::floor(rng.uniform(50, 100));
        const auto before = ee.evaluations();
        const auto r = refine(ee, u0, v0);
        EXPECT_EQ(r.evaluations, ee.evaluations() - before);
        EXPECT_NEAR(r.speedup * static_cast<double>(r.evaluations), 100.0, 1e-9);
    }
}

TEST(Refine, IterationCap) {
    EeEvaluator rising([](double u, double) { return u; });
    EXPECT_THROW(refine(rising, 0, 100, RefineOptions{1.0, 0.0, 3}), ConvergenceError);
    EXPECT_NO_THROW(refine(rising, 0, 100));
}

TEST(Refine, AlternatingLandscapeTerminates) {
    // Ties move downward, so the climb zigzags to the lower boundary and then
    // settles on the first visited peak.
    EeEvaluator zigzag([](double u, double) { return std::fmod(u, 2.0) == 0.0 ? 10.0 : 0.0; });
    const auto r = refine(zigzag, 41, 60);
    EXPECT_EQ(r.umin, 40.0);
    EXPECT_EQ(r.umax, 40.0);
    EXPECT_EQ(r.ee, 10.0);
}

TEST(Refine, InvalidArguments) {
    EXPECT_THROW(refine(pyramid(), 50, 40), ValidationError);
    EXPECT_THROW(refine(pyramid(), -1, 40), ValidationError);
    EXPECT_THROW(refine(pyramid(), 10, 101), ValidationError);
    EXPECT_THROW(refine(pyramid(), 10, 40, RefineOptions{0.0, 0.0, 10}), ValidationError);
    EXPECT_THROW(refine(pyramid(), 10, 40, RefineOptions{1.0, -1.0, 10}), ValidationError);
}

TEST(ParameterGrid, Steps) {
    EXPECT_EQ(parameter_grid(50), (std::vector<double>{0, 50, 100}));
    EXPECT_EQ(parameter_grid(30), (std::vector<double>{0, 30, 60, 90, 100}));
    EXPECT_EQ(parameter_grid(1).size(), 101u);
    EXPECT_THROW(parameter_grid(0), ValidationError);
}

TEST(BruteForce, ClosedFormAndTies) {
    const auto ee = pyramid();
    const auto r = brute_force_optimal(ee);
    EXPECT_EQ(r.umin, 30.0);
    EXPECT_EQ(r.umax, 70.0);
    EXPECT_EQ(r.ee, 100.0);
    EXPECT_EQ(r.evaluations, 101u * 102u / 2u);

    const auto flat = brute_force_optimal(EeEvaluator([](double, double) { return 7.0; }));
    EXPECT_EQ(flat.umin, 0.0);
    EXPECT_EQ(flat.umax, 0.0);

    const auto ridge = brute_force_optimal(EeEvaluator([](double u, double) { return u >= 20.0 ? 1.0 : 0.0; }));
    EXPECT_EQ(ridge.umin, 20.0);
    EXPECT_EQ(ridge.umax, 20.0);
}

TEST(BruteForce, MatchesSequentialEnumeration) {
    const auto t = testing::triangle(10.0);
    const TrafficSnapshot s{"two", {{0, 2, 5.0}, {1, 2, 3.0}, {0, 1, 1.0}}};
    const auto r = brute_force_optimal(EeEvaluator::for_routing(t, s), 10.0);
    double best = -1.0;
    double bu = 0.0, bv = 0.0;
    for (int u = 0; u <= 100; u += 10)
        for (int v = u; v <= 100; v += 10) {
            const double e = route_mept(t, s, UtilityInterval{double(u), double(v)}).energy_saving;
            if (e > best) best = e, bu = u, bv = v;
        }
    EXPECT_EQ(r.ee, best);
    EXPECT_EQ(r.umin, bu);
    EXPECT_EQ(r.umax, bv);
    EXPECT_EQ(r.evaluations, 66u);
}

class RoutingLandscape : public ::testing::TestWithParam<int> {};

TEST_P(RoutingLandscape, RefineStaysOnGridAndBelowOracle) {
    Rng rng(static_cast<std::uint64_t>(GetParam()));
    const auto t = testing::random_topology(rng, 5, 0.35);
    const auto s = testing::random_snapshot(rng, t, 0.6);
    std::mutex mu;
    std::set<std::pair<double, double>> points;
    const auto base = EeEvaluator::for_routing(t, s);
    EeEvaluator ee([&](double u, double v) {
        {
            std::lock_guard lock(mu);
            points.emplace(u, v);
        }
        return base(u, v);
    });
    const auto oracle = brute_force_optimal(base);
    for (int trial = 0; trial < 5; ++trial) {
        points.clear();
        const double u0 = static_cast<double>(rng.below(60));
        const double v0 = u0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(101 - u0)));
        const double start_ee = base(u0, v0);
        const auto r = refine(ee, u0, v0);
        EXPECT_LE(r.ee, oracle.ee);
        EXPECT_GE(r.ee, start_ee);
        EXPECT_EQ(r.evaluations, points.size());
        EXPECT_EQ(r.ee, base(r.umin, r.umax));
        for (const auto& [u, v] : points) {
            EXPECT_EQ(u, std::floor(u));
            EXPECT_EQ(v, std::floor(v));
            EXPECT_GE(u, 0.0);
            EXPECT_LE(u, v);
            EXPECT_LE(v, 100.0);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RoutingLandscape, ::testing::Range(1, 9));

TEST(Labels, ZeroTrafficPicksOrigin) {
    const auto t = testing::triangle();
    const auto labels = label_snapshots(t, {TrafficSnapshot{"idle", {}}}, 10.0);
    ASSERT_EQ(labels.size(), 1u);
    EXPECT_EQ(labels[0].umin, 0.0);
    EXPECT_EQ(labels[0].umax, 0.0);
    EXPECT_EQ(labels[0].ee, 100.0);
    EXPECT_EQ(labels[0].timestamp, "idle");
    EXPECT_EQ(labels[0].features.size(), 6);
}

TEST(Labels, DeterministicAndVolumeSensitive) {
    const auto t = load_topology(testing::data_path("ring6.topo"));
    const auto base = synth_snapshots(t, 3, 1, 4).front();
    const std::vector<TrafficSnapshot> snaps{scale_snapshot(base, 10.0), scale_snapshot(base, 90.0)};
    const auto a = label_snapshots(t, snaps, 5.0);
    const auto b = label_snapshots(t, snaps, 5.0);
    ASSERT_EQ(a.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(a[i].umin, b[i].umin);
        EXPECT_EQ(a[i].umax, b[i].umax);
        EXPECT_EQ(a[i].ee, b[i].ee);
        EXPECT_EQ(a[i].features, b[i].features);
    }
    EXPECT_GE(a[0].ee, a[1].ee);
    EXPECT_TRUE(a[0].umin != a[1].umin || a[0].umax != a[1].umax);
}

}  // namespace
}  // namespace greenroute
