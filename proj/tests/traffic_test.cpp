#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "greenroute/learn/eigen_sym.hpp"
#include "greenroute/learn/pca.hpp"
#include "greenroute/traffic.hpp"
#include "test_util.hpp"

namespace greenroute {
namespace {

using testing::triangle;

TEST(LoadSnapshot, SingleDemand) {
    const auto s = parse_snapshot("demand A B 5.0\n", triangle(), "t0");
    ASSERT_EQ(s.flows.size(), 1u);
    EXPECT_EQ(s.flows[0], (Flow{0, 1, 5.0}));
    EXPECT_EQ(s.timestamp, "t0");
}

TEST(LoadSnapshot, EmptyDemandList) {
    const auto s = parse_snapshot("# nothing today\n", triangle(), "t0");
    EXPECT_TRUE(s.flows.empty());
}

TEST(LoadSnapshot, TimestampLine) {
    EXPECT_EQ(parse_snapshot("timestamp 2004-03-01T00:00\n", triangle(), "x").timestamp, "2004-03-01T00:00");
}

TEST(LoadSnapshot, Errors) {
    EXPECT_THROW(parse_snapshot("demand A Z 1\n", triangle(), "t"), ValidationError);
    EXPECT_THROW(parse_snapshot("demand A B 1\ndemand A B 2\n", triangle(), "t"), ValidationError);
    EXPECT_THROW(parse_snapshot("demand A B -1\n", triangle(), "t"), ValidationError);
    EXPECT_THROW(parse_snapshot("demand A A 1\n", triangle(), "t"), ValidationError);
    EXPECT_THROW(parse_snapshot("demand A B\n", triangle(), "t"), ParseError);
    EXPECT_THROW(parse_snapshot("demand A B x\n", triangle(), "t"), ParseError);
}

TEST(LoadSnapshot, SndlibDemands) {
    const auto s = parse_snapshot(R"(?SNDlib native format; type: demands; version: 1.0
DEMANDS (
  A_B ( A B ) 1 0.25 UNLIMITED
  A_A ( A A ) 1 7.00 UNLIMITED
  C_A ( C A ) 1 3.50 UNLIMITED
)
)",
                                  triangle(), "m0");
    ASSERT_EQ(s.flows.size(), 2u);
    EXPECT_EQ(s.flows[0], (Flow{0, 1, 0.25}));
    EXPECT_EQ(s.flows[1], (Flow{2, 0, 3.5}));
}

TEST(LoadSnapshot, FormatRoundTrips) {
    const auto t = load_topology(testing::data_path("ring6.topo"));
    for (const auto& s : synth_snapshots(t, 2, 5, 11)) EXPECT_EQ(parse_snapshot(format_snapshot(s, t), t, "ignored"), s);
}

TEST(ScaleSnapshot, Examples) {
    const TrafficSnapshot s{"t", {{0, 1, 10.0}, {1, 2, 20.0}}};
    EXPECT_EQ(scale_snapshot(s, 50).flows[0].rate, 5.0);
    EXPECT_EQ(scale_snapshot(s, 100).flows, s.flows);
    const auto tenth = scale_snapshot(s, 10);
    EXPECT_DOUBLE_EQ(tenth.flows[0].rate, 1.0);
    EXPECT_DOUBLE_EQ(tenth.flows[1].rate, 2.0);
    EXPECT_EQ(tenth.timestamp, "t@10");
}

TEST(ScaleSnapshot, RangeChecked) {
    const TrafficSnapshot s{"t", {}};
    EXPECT_THROW(scale_snapshot(s, 0), ValidationError);
    EXPECT_THROW(scale_snapshot(s, 100.5), ValidationError);
    EXPECT_THROW(scale_snapshot(s, -5), ValidationError);
}

Topology ring_of(std::size_t n) { return testing::ring(n); }

TEST(FeatureVector, LengthsMatchNodeCounts) {
    EXPECT_EQ(to_feature_vector({}, ring_of(12)).size(), 132);
    EXPECT_EQ(to_feature_vector({}, ring_of(22)).size(), 462);
    EXPECT_EQ(to_feature_vector({}, ring_of(17)).size(), 272);
}

TEST(FeatureVector, ZeroFlowsGiveZeroVector) {
    EXPECT_TRUE(to_feature_vector({}, triangle()).isZero(0.0));
}

TEST(FeatureVector, PairLayoutIsRowMajorSkippingDiagonal) {
    // Pairs for N = 3: (A,B) (A,C) (B,A) (B,C) (C,A) (C,B)
    const TrafficSnapshot s{"t", {{2, 1, 6.0}, {0, 2, 2.0}, {1, 0, 3.0}}};
    const auto v = to_feature_vector(s, triangle());
    EXPECT_EQ(v, (Eigen::VectorXd(6) << 0, 2, 3, 0, 0, 6).finished());
}

TEST(FeatureVector, IndependentOfFlowOrder) {
    TrafficSnapshot s{"t", {{2, 1, 6.0}, {0, 2, 2.0}, {1, 0, 3.0}}};
    const auto v = to_feature_vector(s, triangle());
    std::reverse(s.flows.begin(), s.flows.end());
    EXPECT_EQ(to_feature_vector(s, triangle()), v);
}

TEST(FeatureVector, ScalingCommutes) {
    const auto t = load_topology(testing::data_path("abilene.topo"));
    const auto s = synth_snapshots(t, 3, 1, 5).front();
    for (double p : {10.0, 37.5, 90.0, 100.0}) {
        const Eigen::VectorXd lhs = to_feature_vector(scale_snapshot(s, p), t);
        const Eigen::VectorXd rhs = (p / 100.0) * to_feature_vector(s, t);
        EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * rhs.cwiseAbs().maxCoeff());
    }
}

TEST(FeatureMatrix, RowsMatchVectors) {
    const auto t = load_topology(testing::data_path("abilene.topo"));
    const auto snaps = synth_snapshots(t, 2, 3, 1);
    const auto m = assemble_feature_matrix(snaps, t);
    EXPECT_EQ(m.rows(), 3);
    EXPECT_EQ(m.cols(), 132);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(Eigen::VectorXd(m.values.row(i).transpose()), to_feature_vector(snaps[static_cast<std::size_t>(i)], t));
        EXPECT_EQ(m.labels[static_cast<std::size_t>(i)], snaps[static_cast<std::size_t>(i)].timestamp);
    }
    EXPECT_EQ(assemble_feature_matrix({snaps[0]}, t).rows(), 1);
    EXPECT_THROW(assemble_feature_matrix({}, t), ValidationError);
}

TEST(Synth, DeterministicGivenSeed) {
    const auto t = load_topology(testing::data_path("ring6.topo"));
    EXPECT_EQ(synth_snapshots(t, 2, 50, 7), synth_snapshots(t, 2, 50, 7));
    EXPECT_NE(synth_snapshots(t, 2, 50, 7), synth_snapshots(t, 2, 50, 8));
}

TEST(Synth, RatesNonNegativeAndValid) {
    const auto t = load_topology(testing::data_path("abilene.topo"));
    for (const auto& s : synth_snapshots(t, 3, 20, 3)) {
        validate_snapshot(s, t);
        for (const auto& f : s.flows) EXPECT_GE(f.rate, 0.0);
    }
}

TEST(Synth, LatentDimOneIsNumericallyRankOne) {
    const auto t = load_topology(testing::data_path("abilene.topo"));
    const auto x = assemble_feature_matrix(synth_snapshots(t, 1, 80, 21), t).values;
    const Eigen::VectorXd mean = x.colwise().mean().transpose();
    const auto eig = learn::eig_sym(learn::covariance(x, mean));
    EXPECT_LT(eig.values(1), 0.01 * eig.values(0));
}

TEST(Synth, LatentDimBoundsSpectrum) {
    const auto t = load_topology(testing::data_path("abilene.topo"));
    const auto x = assemble_feature_matrix(synth_snapshots(t, 3, 100, 4), t).values;
    const auto pca = learn::pca_fit(x, 3);
    EXPECT_GE(learn::variance_retained(pca.eigenvalues, 3), 95.0);
    EXPECT_LT(learn::variance_retained(pca.eigenvalues, 2), 99.0);
}

}  // namespace
}  // namespace greenroute
