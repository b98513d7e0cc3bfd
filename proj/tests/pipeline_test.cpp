#include <gtest/gtest.h>

#include <filesystem>
#include <memory>

#include "greenroute/pipeline.hpp"
#include "test_util.hpp"

namespace greenroute::pipeline {
namespace {

namespace fs = std::filesystem;

PipelineConfig small_config(const std::string& root) {
    PipelineConfig cfg;
    cfg.topology = testing::data_path("ring6.topo");
    cfg.snapshots = root + "/train";
    cfg.out = root + "/train";
    cfg.data = root + "/data";
    cfg.models = root + "/models";
    cfg.volumes = {30, 70};
    cfg.folds = 5;
    cfg.grid_step = 5.0;
    cfg.alpha = 5.0;
    cfg.count = 20;
    cfg.seed = 3;
    return cfg;
}

class Pipeline : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        root_ = new std::string(testing::scratch_dir("pipeline"));
        auto cfg = small_config(*root_);
        cmd_synth(cfg, 3, *root_ + "/test");
        cfg.out = cfg.data;
        cmd_label(cfg);
        models_ = new TrainedModels(cmd_train(cfg));
        cfg.snapshots = *root_ + "/test";
        cfg.out = *root_ + "/eval";
        report_ = new RunReport(cmd_evaluate(cfg));
    }
    static void TearDownTestSuite() {
        delete report_;
        delete models_;
        delete root_;
    }

    static std::string* root_;
    static TrainedModels* models_;
    static RunReport* report_;
};

std::string* Pipeline::root_ = nullptr;
TrainedModels* Pipeline::models_ = nullptr;
RunReport* Pipeline::report_ = nullptr;

TEST_F(Pipeline, WritesEveryArtifact) {
    for (const auto* f : {"train/snap-0000.txt", "train/snap-0019.txt", "train/latent.csv", "test/snap-0020.txt",
                          "test/snap-0022.txt", "data/labels.csv", "data/features.csv", "models/umin.model",
                          "models/umax.model", "models/umin_given_umax.model", "models/umax_given_umin.model",
                          "models/cv_umin.csv", "models/cv_umax.csv", "eval/report.csv", "eval/accuracy_vs_volume.csv",
                          "eval/energy_vs_volume.csv", "eval/path_length_vs_volume.csv", "eval/speedup_vs_volume.csv",
                          "eval/cv_curves.csv"})
        EXPECT_TRUE(fs::exists(*root_ + "/" + f)) << f;
    const auto labels = csv::load(*root_ + "/data/labels.csv");
    EXPECT_EQ(labels.rows.size(), 40u);
    const auto features = csv::load(*root_ + "/data/features.csv");
    EXPECT_EQ(features.header.size(), 31u);
    EXPECT_EQ(features.header[1], "n0->n1");
}

TEST_F(Pipeline, ReportShape) {
    ASSERT_EQ(report_->rows.size(), 6u);
    EXPECT_EQ(report_->rows[0].volume, 30.0);
    EXPECT_EQ(report_->rows[1].volume, 70.0);
    const auto acc = csv::load(*root_ + "/eval/accuracy_vs_volume.csv");
    EXPECT_EQ(acc.rows.size(), 2u);
    const auto report = csv::load(*root_ + "/eval/report.csv");
    EXPECT_EQ(report.rows.size(), 6u);
}

TEST_F(Pipeline, ReportRowsAreConsistent) {
    const auto topo = load_topology(testing::data_path("ring6.topo"));
    const auto base = load_snapshot_dir(*root_ + "/test", topo);
    for (std::size_t i = 0; i < report_->rows.size(); ++i) {
        const auto& r = report_->rows[i];
        const auto scaled = scale_snapshot(base[i / 2], r.volume);
        EXPECT_EQ(r.timestamp, scaled.timestamp);
        const auto again = route_mept(topo, scaled, UtilityInterval{r.refined_umin, r.refined_umax});
        EXPECT_EQ(again.energy_saving, r.refined_ee);
        EXPECT_EQ(again.energy_saving, r.energy_saving);
        EXPECT_GE(r.refined_ee, r.predicted_ee);
        EXPECT_GE(r.oracle_ee + 1e-12, r.refined_ee);
        EXPECT_NEAR(r.speedup * static_cast<double>(r.evaluations), 100.0, 1e-9);
        for (double a : {r.acc_umin, r.acc_umax, r.acc_umin_given_umax, r.acc_umax_given_umin}) {
            EXPECT_GE(a, 0.0);
            EXPECT_LE(a, 100.0);
        }
        EXPECT_LE(r.refined_umin, r.refined_umax);
    }
}

TEST_F(Pipeline, SavedModelsMatchTrainedOnes) {
    const auto loaded = load_models(*root_ + "/models");
    EXPECT_EQ(learn::format_model(loaded.umin), learn::format_model(models_->umin));
    EXPECT_EQ(learn::format_model(loaded.umax), learn::format_model(models_->umax));
    EXPECT_EQ(learn::format_model(loaded.umin_given_umax), learn::format_model(models_->umin_given_umax));
    EXPECT_EQ(learn::format_model(loaded.umax_given_umin), learn::format_model(models_->umax_given_umin));
    EXPECT_EQ(loaded.cv.umin.chosen_k, models_->cv.umin.chosen_k);
    EXPECT_EQ(loaded.cv.umax.chosen_k, models_->cv.umax.chosen_k);
}

TEST_F(Pipeline, AutomaticKFollowsCrossValidation) {
    EXPECT_EQ(models_->umin.pca.k, models_->cv.umin.chosen_k);
    EXPECT_EQ(models_->umax.pca.k, models_->cv.umax.chosen_k);
    EXPECT_EQ(models_->umin_given_umax.pca.k, models_->cv.umin.chosen_k);
    EXPECT_EQ(models_->umax_given_umin.pca.k, models_->cv.umax.chosen_k);
    EXPECT_EQ(models_->cv.umin.rows.size(), 30u);
}

TEST_F(Pipeline, EvaluationIsDeterministic) {
    auto cfg = small_config(*root_);
    cfg.snapshots = *root_ + "/test";
    cfg.out = *root_ + "/eval2";
    cmd_evaluate(cfg);
    for (const auto* f : {"report.csv", "accuracy_vs_volume.csv", "energy_vs_volume.csv", "cv_curves.csv"})
        EXPECT_EQ(text::read_file(*root_ + "/eval/" + f), text::read_file(*root_ + "/eval2/" + f)) << f;
}

TEST_F(Pipeline, ModelFromOtherTopologyIsRejected) {
    const auto tri = testing::triangle();
    auto cfg = small_config(*root_);
    const TrafficSnapshot s{"tri", {{0, 1, 1.0}}};
    EXPECT_THROW(evaluate_snapshot(tri, s, 50, *models_, std::make_shared<const CandidateTable>(tri, 4), cfg),
                 ValidationError);
}

TEST(PipelineTrain, LinearLabelsAreFitExactly) {
    const auto root = testing::scratch_dir("pipeline-linear");
    const auto topo = load_topology(testing::data_path("ring6.topo"));
    const auto snaps = synth_snapshots(topo, 3, 60, 8);
    std::vector<Label> labels;
    for (const auto& s : snaps) {
        const auto f = to_feature_vector(s, topo);
        const double umax = 40.0 + 0.05 * f.sum();
        labels.push_back(Label{s.timestamp, f, 0.5 * umax, umax, 0.0});
    }
    text::write_file(root + "/labels.csv", labels_csv(labels));
    text::write_file(root + "/features.csv", features_csv(labels, topo));
    PipelineConfig cfg;
    cfg.topology = testing::data_path("ring6.topo");
    cfg.out = root;
    cfg.pca_k = 30;  // the label also sees the noise directions, so keep them all
    const auto m = cmd_train(cfg);
    const auto data = load_training_data(root);
    for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
        const Eigen::VectorXd f = data.features.row(i).transpose();
        EXPECT_GT(learn::prediction_accuracy(data.umax(i), learn::predict(m.umax, f)), 99.9);
        EXPECT_GT(learn::prediction_accuracy(data.umin(i), learn::predict(m.umin_given_umax, f, data.umax(i))), 99.9);
    }
    EXPECT_EQ(m.umax.pca.k, 30u);
}

TEST(PipelineTrain, TooFewSamples) {
    const auto root = testing::scratch_dir("pipeline-few");
    const auto topo = load_topology(testing::data_path("ring6.topo"));
    std::vector<Label> labels;
    for (const auto& s : synth_snapshots(topo, 3, 4, 1)) labels.push_back(Label{s.timestamp, to_feature_vector(s, topo), 10, 50, 0});
    text::write_file(root + "/labels.csv", labels_csv(labels));
    text::write_file(root + "/features.csv", features_csv(labels, topo));
    PipelineConfig cfg;
    cfg.out = root;
    EXPECT_THROW(cmd_train(cfg), ValidationError);
}

TEST(ParseVolumes, ListsAndEllipsis) {
    EXPECT_EQ(parse_volumes("50"), (std::vector<double>{50}));
    EXPECT_EQ(parse_volumes("10, 30,45"), (std::vector<double>{10, 30, 45}));
    EXPECT_EQ(parse_volumes("10,20,...,90"), (std::vector<double>{10, 20, 30, 40, 50, 60, 70, 80, 90}));
    EXPECT_THROW(parse_volumes("10,...,90"), ValidationError);
    EXPECT_THROW(parse_volumes("ten"), ValidationError);
    EXPECT_THROW(parse_volumes(""), ValidationError);
    PipelineConfig cfg;
    cfg.volumes = {0};
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg.volumes = {120};
    EXPECT_THROW(cfg.validate(), ValidationError);
}

}  // namespace
}  // namespace greenroute::pipeline
