#pragma once

// End-to-end stages behind the command line: synthesize traffic, label it by
// brute force, cross-validate and train the four predictors, then evaluate
// prediction + refinement against the brute-force optimum.
//
// Files written under the output directory:
//   synth     snap-NNNN.txt, latent.csv
//   label     labels.csv, features.csv
//   cv        cv_umin.csv, cv_umax.csv
//   train     <target>.model for the four targets, cv_umin.csv, cv_umax.csv
//   evaluate  report.csv, accuracy_vs_volume.csv, energy_vs_volume.csv,
//             path_length_vs_volume.csv, speedup_vs_volume.csv, cv_curves.csv

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "greenroute/csv.hpp"
#include "greenroute/eeroute.hpp"
#include "greenroute/error.hpp"
#include "greenroute/learn/cross_validation.hpp"
#include "greenroute/learn/metrics.hpp"
#include "greenroute/learn/model_io.hpp"
#include "greenroute/learn/predictor.hpp"
#include "greenroute/netmodel.hpp"
#include "greenroute/text.hpp"
#include "greenroute/traffic.hpp"
#include "greenroute/tune.hpp"

namespace greenroute::pipeline {

namespace fs = std::filesystem;

struct PipelineConfig {
    std::string topology;
    std::string snapshots;  // directory of snapshot files
    std::string data;       // labels.csv / features.csv location; defaults to out
    std::string models;     // model directory; defaults to out
    std::string out = ".";
    std::vector<double> volumes{10, 20, 30, 40, 50, 60, 70, 80, 90};
    std::optional<std::size_t> pca_k;  // nullopt = pick by cross-validation
    std::size_t folds = learn::kDefaultFolds;
    double alpha = 1.0;
    double beta = 0.0;
    double epsilon = learn::kDefaultEpsilon;
    std::size_t paths_k = kDefaultCandidatePaths;
    std::uint64_t seed = 1;
    double grid_step = 1.0;
    std::size_t latent_dim = 3;
    std::size_t count = 100;

    std::string data_dir() const { return data.empty() ? out : data; }
    std::string model_dir() const { return models.empty() ? out : models; }

    void validate() const {
        if (volumes.empty()) throw ValidationError("volume grid is empty");
        for (double v : volumes)
            if (!(v > 0.0 && v <= 100.0)) throw ValidationError("volume " + text::exact(v) + " outside (0, 100]");
        if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
        if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
        if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
        if (paths_k == 0) throw ValidationError("paths-k must be >= 1");
        if (folds < 2) throw ValidationError("folds must be >= 2");
        if (!(grid_step > 0.0)) throw ValidationError("grid step must be > 0");
    }
};

/// Comma list of percentages. "10,20,...,90" expands the arithmetic
/// progression set by the two values before the ellipsis.
inline std::vector<double> parse_volumes(const std::string& spec) {
    std::vector<double> out;
    const auto parts = text::split(spec, ',');
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto part = text::trim(parts[i]);
        if (part == "...") {
            if (out.size() < 2 || i + 1 >= parts.size()) throw ValidationError("'...' needs two values before and one after");
            double last = 0.0;
            if (!text::parse_double(parts[i + 1], last)) throw ValidationError("invalid volume '" + std::string(parts[i + 1]) + "'");
            const double step = out[out.size() - 1] - out[out.size() - 2];
            if (!(step > 0.0)) throw ValidationError("'...' needs an increasing progression");
            const double first = out.back();
            for (std::size_t j = 1;; ++j) {
                const double v = first + static_cast<double>(j) * step;
                if (v >= last - 1e-9) break;
                out.push_back(v);
            }
            continue;
        }
        double v = 0.0;
        if (!text::parse_double(part, v)) throw ValidationError("invalid volume '" + std::string(part) + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError("empty volume list");
    return out;
}

inline std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());
}

/// Regular, non-hidden, non-CSV files of a directory in filename order.
inline std::vector<std::string> list_snapshot_files(const std::string& dir) {
    if (!fs::is_directory(dir)) throw Error("snapshot directory not found: " + dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && !name.empty() && name.front() != '.' && entry.path().extension() != ".csv")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no snapshot files in " + dir);
    return files;
}

inline std::vector<TrafficSnapshot> load_snapshot_dir(const std::string& dir, const Topology& t) {
    std::vector<TrafficSnapshot> out;
    for (const auto& f : list_snapshot_files(dir)) out.push_back(load_snapshot(f, t));
    return out;
}

/// Every snapshot at every volume, snapshot-major.
inline std::vector<TrafficSnapshot> expand_volumes(const std::vector<TrafficSnapshot>& base,
                                                   const std::vector<double>& volumes) {
    std::vector<TrafficSnapshot> out;
    out.reserve(base.size() * volumes.size());
    for (const auto& s : base)
        for (double v : volumes) out.push_back(scale_snapshot(s, v));
    return out;
}

// ---------------------------------------------------------------------------
// synth

namespace detail {

inline std::vector<std::string> write_synth(const Topology& topo, const SyntheticTraffic& traffic, std::size_t first,
                                            std::size_t last, const std::string& dir) {
    ensure_dir(dir);
    std::vector<std::string> written;
    std::string latent = "timestamp";
    for (Eigen::Index j = 0; j < traffic.latent.cols(); ++j) latent += ",z" + std::to_string(j);
    latent += '\n';
    for (std::size_t i = first; i < last; ++i) {
        const auto& s = traffic.snapshots[i];
        const auto path = path_in(dir, "snap-" + s.timestamp.substr(s.timestamp.find('-') + 1) + ".txt");
        text::write_file(path, format_snapshot(s, topo));
        written.push_back(path);
        latent += s.timestamp;
        for (Eigen::Index j = 0; j < traffic.latent.cols(); ++j)
            latent += "," + text::fixed4(traffic.latent(static_cast<Eigen::Index>(i), j));
        latent += '\n';
    }
    text::write_file(path_in(dir, "latent.csv"), latent);
    return written;
}

}  // namespace detail

/// Writes `count` snapshots to cfg.out and, when test_count > 0, the next
/// test_count snapshots from the same generator to test_out.
inline std::vector<std::string> cmd_synth(const PipelineConfig& cfg, std::size_t test_count = 0,
                                          const std::string& test_out = {}) {
    if (test_count > 0 && test_out.empty()) throw ValidationError("a held-out count needs a held-out directory");
    const auto topo = load_topology(cfg.topology);
    const auto traffic = synth_traffic(topo, cfg.latent_dim, cfg.count + test_count, cfg.seed);
    auto written = detail::write_synth(topo, traffic, 0, cfg.count, cfg.out);
    if (test_count > 0) {
        const auto held = detail::write_synth(topo, traffic, cfg.count, cfg.count + test_count, test_out);
        written.insert(written.end(), held.begin(), held.end());
    }
    return written;
}

// ---------------------------------------------------------------------------
// label

inline std::string labels_csv(const std::vector<Label>& labels) {
    std::string out = "timestamp,umin_opt,umax_opt,ee_opt\n";
    for (const auto& l : labels)
        out += l.timestamp + "," + text::fixed4(l.umin) + "," + text::fixed4(l.umax) + "," + text::fixed4(l.ee) + "\n";
    return out;
}

inline std::string features_csv(const std::vector<Label>& labels, const Topology& t) {
    std::string out = "timestamp";
    for (NodeIndex a = 0; a < t.node_count(); ++a)
        for (NodeIndex b = 0; b < t.node_count(); ++b)
            if (a != b) out += "," + t.node_id(a) + "->" + t.node_id(b);
    out += '\n';
    for (const auto& l : labels) {
        out += l.timestamp;
        for (Eigen::Index i = 0; i < l.features.size(); ++i) out += "," + text::fixed4(l.features(i));
        out += '\n';
    }
    return out;
}

inline std::vector<Label> cmd_label(const PipelineConfig& cfg) {
    cfg.validate();
    const auto topo = load_topology(cfg.topology);
    const auto base = load_snapshot_dir(cfg.snapshots, topo);
    const auto scaled = expand_volumes(base, cfg.volumes);
    std::vector<Label> labels;
    try {
        labels = label_snapshots(topo, scaled, cfg.grid_step, cfg.paths_k);
    } catch (const UnroutableError& e) {
        throw UnroutableError(std::string("while labelling: ") + e.what());
    }
    ensure_dir(cfg.out);
    text::write_file(path_in(cfg.out, "labels.csv"), labels_csv(labels));
    text::write_file(path_in(cfg.out, "features.csv"), features_csv(labels, topo));
    return labels;
}

// ---------------------------------------------------------------------------
// training data

struct TrainingData {
    std::vector<std::string> timestamps;
    Eigen::MatrixXd features;
    Eigen::VectorXd umin;
    Eigen::VectorXd umax;
};

inline TrainingData load_training_data(const std::string& dir) {
    const auto labels_path = path_in(dir, "labels.csv");
    const auto features_path = path_in(dir, "features.csv");
    const auto labels = csv::load(labels_path);
    const auto features = csv::load(features_path);
    if (labels.rows.size() != features.rows.size())
        throw ValidationError("labels.csv and features.csv have different row counts");
    const auto c_ts = labels.column("timestamp");
    const auto c_umin = labels.column("umin_opt");
    const auto c_umax = labels.column("umax_opt");

    TrainingData d;
    const auto rows = static_cast<Eigen::Index>(labels.rows.size());
    const auto n = static_cast<Eigen::Index>(features.header.size()) - 1;
    d.features.resize(rows, n);
    d.umin.resize(rows);
    d.umax.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& lrow = labels.rows[static_cast<std::size_t>(r)];
        const auto& frow = features.rows[static_cast<std::size_t>(r)];
        if (lrow[c_ts] != frow[0]) throw ValidationError("row " + std::to_string(r + 1) + ": timestamps differ between labels and features");
        d.timestamps.push_back(lrow[c_ts]);
        d.umin(r) = csv::number(lrow[c_umin], labels_path);
        d.umax(r) = csv::number(lrow[c_umax], labels_path);
        for (Eigen::Index c = 0; c < n; ++c) d.features(r, c) = csv::number(frow[static_cast<std::size_t>(c) + 1], features_path);
    }
    return d;
}

// ---------------------------------------------------------------------------
// cv

inline std::string cv_csv(const learn::CvReport& r) {
    std::string out = "k,pcs_percent,size_reduction,accuracy,variance_retained,chosen\n";
    for (const auto& row : r.rows)
        out += std::to_string(row.k) + "," + text::fixed4(100.0 * static_cast<double>(row.k) / static_cast<double>(r.features)) +
               "," + text::fixed4(row.size_reduction) + "," + text::fixed4(row.accuracy) + "," +
               text::fixed4(row.variance_retained) + "," + (row.k == r.chosen_k ? "1" : "0") + "\n";
    return out;
}

struct CvResults {
    learn::CvReport umin;
    learn::CvReport umax;
};

inline CvResults run_cv(const PipelineConfig& cfg, const TrainingData& data) {
    const auto samples = static_cast<std::size_t>(data.features.rows());
    if (samples < cfg.folds)
        throw ValidationError("insufficient samples for " + std::to_string(cfg.folds) + "-fold cross-validation: " +
                              std::to_string(samples));
    CvResults r;
    r.umin = learn::cross_validate_k(data.features, data.umin, {}, cfg.folds, cfg.seed, cfg.epsilon);
    r.umax = learn::cross_validate_k(data.features, data.umax, {}, cfg.folds, cfg.seed, cfg.epsilon);
    return r;
}

inline CvResults cmd_cv(const PipelineConfig& cfg) {
    cfg.validate();
    const auto data = load_training_data(cfg.data_dir());
    auto r = run_cv(cfg, data);
    ensure_dir(cfg.out);
    text::write_file(path_in(cfg.out, "cv_umin.csv"), cv_csv(r.umin));
    text::write_file(path_in(cfg.out, "cv_umax.csv"), cv_csv(r.umax));
    return r;
}

// ---------------------------------------------------------------------------
// train

struct TrainedModels {
    learn::Predictor umin;
    learn::Predictor umax;
    learn::Predictor umin_given_umax;
    learn::Predictor umax_given_umin;
    CvResults cv;
};

inline std::string model_path(const std::string& dir, learn::Target t) {
    return path_in(dir, std::string(learn::target_name(t)) + ".model");
}

inline TrainedModels cmd_train(const PipelineConfig& cfg) {
    cfg.validate();
    const auto data = load_training_data(cfg.data_dir());
    TrainedModels m;
    m.cv = run_cv(cfg, data);
    const auto n = static_cast<std::size_t>(data.features.cols());
    if (cfg.pca_k && (*cfg.pca_k < 1 || *cfg.pca_k > n))
        throw ValidationError("--k " + std::to_string(*cfg.pca_k) + " outside [1, " + std::to_string(n) + "]");
    const auto k_umin = cfg.pca_k.value_or(m.cv.umin.chosen_k);
    const auto k_umax = cfg.pca_k.value_or(m.cv.umax.chosen_k);

    using learn::Target;
    m.umin = learn::train_predictor(data.features, data.umin, k_umin, Target::Umin);
    m.umax = learn::train_predictor(data.features, data.umax, k_umax, Target::Umax);
    m.umin_given_umax = learn::train_predictor(data.features, data.umin, k_umin, Target::UminGivenUmax, data.umax);
    m.umax_given_umin = learn::train_predictor(data.features, data.umax, k_umax, Target::UmaxGivenUmin, data.umin);

    const auto dir = cfg.model_dir();
    ensure_dir(dir);
    for (const auto* p : {&m.umin, &m.umax, &m.umin_given_umax, &m.umax_given_umin})
        learn::save_model(model_path(dir, p->target()), *p);
    text::write_file(path_in(dir, "cv_umin.csv"), cv_csv(m.cv.umin));
    text::write_file(path_in(dir, "cv_umax.csv"), cv_csv(m.cv.umax));
    return m;
}

// ---------------------------------------------------------------------------
// evaluate

struct ReportRow {
    std::string timestamp;
    double volume = 0.0;
    double pred_umin = 0.0, pred_umax = 0.0;
    double refined_umin = 0.0, refined_umax = 0.0;
    double oracle_umin = 0.0, oracle_umax = 0.0;
    double acc_umin = 0.0, acc_umax = 0.0;
    double acc_umin_given_umax = 0.0, acc_umax_given_umin = 0.0;
    double predicted_ee = 0.0, refined_ee = 0.0, oracle_ee = 0.0;
    std::size_t evaluations = 0;
    double speedup = 0.0;
    double energy_saving = 0.0;  // at the refined pair
    double avg_path_length = 0.0;
};

struct RunReport {
    std::vector<ReportRow> rows;
    CvResults cv;
};

/// Prediction, refinement and brute-force oracle for one scaled snapshot.
inline ReportRow evaluate_snapshot(const Topology& topo, const TrafficSnapshot& scaled, double volume,
                                   const TrainedModels& m, const std::shared_ptr<const CandidateTable>& table,
                                   const PipelineConfig& cfg) {
    const auto features = to_feature_vector(scaled, topo);
    if (features.size() != m.umin.pca.features())
        throw ValidationError("model expects " + std::to_string(m.umin.pca.features()) + " features, topology gives " +
                              std::to_string(features.size()));
    ReportRow row;
    row.timestamp = scaled.timestamp;
    row.volume = volume;
    row.pred_umin = learn::predict(m.umin, features);
    row.pred_umax = learn::predict(m.umax, features);

    const auto ee = EeEvaluator::for_routing(topo, scaled, table);
    const auto oracle = brute_force_optimal(ee, cfg.grid_step);
    row.oracle_umin = oracle.umin;
    row.oracle_umax = oracle.umax;
    row.oracle_ee = oracle.ee;

    row.acc_umin = learn::prediction_accuracy(oracle.umin, row.pred_umin, cfg.epsilon);
    row.acc_umax = learn::prediction_accuracy(oracle.umax, row.pred_umax, cfg.epsilon);
    row.acc_umin_given_umax =
        learn::prediction_accuracy(oracle.umin, learn::predict(m.umin_given_umax, features, oracle.umax), cfg.epsilon);
    row.acc_umax_given_umin =
        learn::prediction_accuracy(oracle.umax, learn::predict(m.umax_given_umin, features, oracle.umin), cfg.epsilon);

    // Refinement works on the alpha lattice; start from the nearest lattice point.
    auto snap = [&](double x) { return std::clamp(std::round(x / cfg.alpha) * cfg.alpha, 0.0, 100.0); };
    const double start_umin = snap(std::min(row.pred_umin, row.pred_umax));
    const double start_umax = snap(std::max(row.pred_umin, row.pred_umax));
    row.predicted_ee = ee(start_umin, start_umax);
    const auto refined = refine(ee, start_umin, start_umax, RefineOptions{cfg.alpha, cfg.beta, 1000});
    row.refined_umin = refined.umin;
    row.refined_umax = refined.umax;
    row.refined_ee = refined.ee;
    row.evaluations = refined.evaluations;
    row.speedup = refined.speedup;

    const auto outcome = route_mept(topo, scaled, UtilityInterval{refined.umin, refined.umax}, *table);
    row.energy_saving = outcome.energy_saving;
    row.avg_path_length = outcome.avg_path_length;
    return row;
}

inline std::string report_csv(const RunReport& r) {
    std::string out =
        "timestamp,volume,pred_umin,pred_umax,refined_umin,refined_umax,oracle_umin,oracle_umax,acc_umin,acc_umax,"
        "acc_umin_given_umax,acc_umax_given_umin,predicted_ee,refined_ee,oracle_ee,evaluations,speedup,energy_saving,"
        "avg_path_length\n";
    for (const auto& x : r.rows) {
        std::vector<std::string> cells{x.timestamp};
        for (double v : {x.volume, x.pred_umin, x.pred_umax, x.refined_umin, x.refined_umax, x.oracle_umin,
                         x.oracle_umax, x.acc_umin, x.acc_umax, x.acc_umin_given_umax, x.acc_umax_given_umin,
                         x.predicted_ee, x.refined_ee, x.oracle_ee})
            cells.push_back(text::fixed4(v));
        cells.push_back(std::to_string(x.evaluations));
        for (double v : {x.speedup, x.energy_saving, x.avg_path_length}) cells.push_back(text::fixed4(v));
        out += csv::join(cells);
    }
    return out;
}

namespace detail {

/// One row per volume (in config order) holding the mean of each selected column.
template <class... Getters>
std::string per_volume_means(const RunReport& r, const std::vector<double>& volumes, const std::string& header,
                             Getters... getters) {
    std::string out = header + "\n";
    for (double vol : volumes) {
        std::vector<double> sums{((void)getters, 0.0)...};
        std::size_t count = 0;
        for (const auto& row : r.rows) {
            if (row.volume != vol) continue;
            std::size_t i = 0;
            ((sums[i++] += getters(row)), ...);
            ++count;
        }
        std::vector<std::string> cells{text::fixed4(vol)};
        for (double s : sums) cells.push_back(text::fixed4(count ? s / static_cast<double>(count) : 0.0));
        out += csv::join(cells);
    }
    return out;
}

inline std::string cv_curves_csv(const CvResults& cv) {
    std::string out = "target,k,pcs_percent,size_reduction,accuracy,variance_retained,chosen\n";
    for (const auto& [name, rep] : {std::pair<std::string, const learn::CvReport*>{"umin", &cv.umin}, {"umax", &cv.umax}}) {
        const auto body = cv_csv(*rep);
        for (auto line : text::split(body, '\n')) {
            if (line.empty() || line.starts_with("k,")) continue;
            out += name + "," + std::string(line) + "\n";
        }
    }
    return out;
}

inline learn::CvReport load_cv(const std::string& path) {
    const auto t = csv::load(path);
    learn::CvReport r;
    const auto ck = t.column("k"), cs = t.column("size_reduction"),
               ca = t.column("accuracy"), cvr = t.column("variance_retained"), cc = t.column("chosen");
    for (const auto& row : t.rows) {
        std::size_t k = 0;
        if (!text::parse_size(row[ck], k)) throw ParseError(path, 0, "invalid k");
        r.rows.push_back(learn::CvRow{k, csv::number(row[cs], path), csv::number(row[ca], path), csv::number(row[cvr], path)});
        if (row[cc] == "1") r.chosen_k = k;
    }
    return r;
}

}  // namespace detail

inline TrainedModels load_models(const std::string& dir) {
    using learn::Target;
    TrainedModels m;
    m.umin = learn::load_model(model_path(dir, Target::Umin));
    m.umax = learn::load_model(model_path(dir, Target::Umax));
    m.umin_given_umax = learn::load_model(model_path(dir, Target::UminGivenUmax));
    m.umax_given_umin = learn::load_model(model_path(dir, Target::UmaxGivenUmin));
    if (fs::exists(path_in(dir, "cv_umin.csv"))) m.cv.umin = detail::load_cv(path_in(dir, "cv_umin.csv"));
    if (fs::exists(path_in(dir, "cv_umax.csv"))) m.cv.umax = detail::load_cv(path_in(dir, "cv_umax.csv"));
    m.cv.umin.features = static_cast<std::size_t>(m.umin.pca.features());
    m.cv.umax.features = static_cast<std::size_t>(m.umax.pca.features());
    return m;
}

inline RunReport cmd_evaluate(const PipelineConfig& cfg) {
    cfg.validate();
    const auto topo = load_topology(cfg.topology);
    const auto models = load_models(cfg.model_dir());
    const auto base = load_snapshot_dir(cfg.snapshots, topo);
    auto table = std::make_shared<const CandidateTable>(topo, cfg.paths_k);

    RunReport report;
    report.cv = models.cv;
    for (const auto& s : base)
        for (double vol : cfg.volumes)
            report.rows.push_back(evaluate_snapshot(topo, scale_snapshot(s, vol), vol, models, table, cfg));

    ensure_dir(cfg.out);
    text::write_file(path_in(cfg.out, "report.csv"), report_csv(report));
    text::write_file(path_in(cfg.out, "accuracy_vs_volume.csv"),
                     detail::per_volume_means(
                         report, cfg.volumes, "volume,acc_umin,acc_umax,acc_umin_given_umax,acc_umax_given_umin",
                         [](const ReportRow& r) { return r.acc_umin; }, [](const ReportRow& r) { return r.acc_umax; },
                         [](const ReportRow& r) { return r.acc_umin_given_umax; },
                         [](const ReportRow& r) { return r.acc_umax_given_umin; }));
    text::write_file(path_in(cfg.out, "energy_vs_volume.csv"),
                     detail::per_volume_means(
                         report, cfg.volumes, "volume,energy_saving,oracle_ee,predicted_ee",
                         [](const ReportRow& r) { return r.energy_saving; }, [](const ReportRow& r) { return r.oracle_ee; },
                         [](const ReportRow& r) { return r.predicted_ee; }));
    text::write_file(path_in(cfg.out, "path_length_vs_volume.csv"),
                     detail::per_volume_means(report, cfg.volumes, "volume,avg_path_length",
                                              [](const ReportRow& r) { return r.avg_path_length; }));
    text::write_file(path_in(cfg.out, "speedup_vs_volume.csv"),
                     detail::per_volume_means(
                         report, cfg.volumes, "volume,speedup,evaluations",
                         [](const ReportRow& r) { return r.speedup; },
                         [](const ReportRow& r) { return static_cast<double>(r.evaluations); }));
    text::write_file(path_in(cfg.out, "cv_curves.csv"), detail::cv_curves_csv(report.cv));
    return report;
}

}  // namespace greenroute::pipeline
