// greenroute: energy-aware routing parameter prediction pipeline.
//
//   greenroute synth    --topology T --out DIR [--count N --latent-dim D --seed S
//                       --test-count M --test-out DIR]
//   greenroute label    --topology T --snapshots DIR --out DIR [--volumes ...]
//   greenroute cv       --out DIR [--data DIR --folds 10 --seed S]
//   greenroute train    --out DIR [--data DIR --models DIR --k auto|<int>]
//   greenroute evaluate --topology T --snapshots DIR --models DIR --out DIR
//   greenroute route    --topology T --snapshot FILE --umin U --umax V
//
// Any option can also come from a config file (--config FILE, key = value);
// command-line flags take precedence.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "greenroute/eeroute.hpp"
#include "greenroute/pipeline.hpp"
#include "greenroute/text.hpp"

namespace gr = greenroute;
namespace pl = greenroute::pipeline;

static std::string join_commas(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) out += (out.empty() ? "" : ",") + item;
    return out;
}

int main(int argc, char** argv) {
    CLI::App app{"Energy-aware routing: label, learn and refine utility intervals"};
    app.set_config("--config", "", "Config file (key = value); flags override it");
    app.require_subcommand(1);

    pl::PipelineConfig cfg;
    // Kept as separate items: config files hand comma lists over already split.
    std::vector<std::string> volumes{"10", "20", "...", "90"};
    std::string k_option = "auto";
    std::string snapshot_file;
    double umin = 0.0;
    double umax = 100.0;
    std::size_t test_count = 0;
    std::string test_out;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--topology", cfg.topology, "Topology file (native or SNDlib)");
        sub->add_option("--snapshots", cfg.snapshots, "Directory of traffic snapshot files");
        sub->add_option("--volumes", volumes, "Traffic volume percentages, e.g. 10,20,...,90")->delimiter(',');
        sub->add_option("--k", k_option, "PCA component count: auto or an integer");
        sub->add_option("--folds", cfg.folds, "Cross-validation folds");
        sub->add_option("--alpha", cfg.alpha, "Refine step (percent)");
        sub->add_option("--beta", cfg.beta, "Refine stopping threshold (percent)");
        sub->add_option("--epsilon", cfg.epsilon, "Accuracy tolerance (percent)");
        sub->add_option("--paths-k", cfg.paths_k, "Candidate paths per flow");
        sub->add_option("--seed", cfg.seed, "Seed for fold shuffling and synthetic data");
        sub->add_option("--out", cfg.out, "Output directory");
        sub->add_option("--data", cfg.data, "Directory holding labels.csv and features.csv (default: --out)");
        sub->add_option("--models", cfg.models, "Model directory (default: --out)");
        sub->add_option("--grid-step", cfg.grid_step, "Brute-force grid step (percent)");
        sub->add_option("--count", cfg.count, "Synthetic snapshot count");
        sub->add_option("--latent-dim", cfg.latent_dim, "Synthetic latent dimension");
        sub->configurable();
    };

    auto* synth = app.add_subcommand("synth", "Write seeded low-rank synthetic snapshots");
    auto* label = app.add_subcommand("label", "Brute-force optimal (umin, umax) labels for every snapshot and volume");
    auto* cv = app.add_subcommand("cv", "Cross-validate the PCA component count");
    auto* train = app.add_subcommand("train", "Cross-validate and train the four predictors");
    auto* evaluate = app.add_subcommand("evaluate", "Predict, refine and compare against brute force");
    auto* route = app.add_subcommand("route", "Route one snapshot and print the per-link outcome CSV");
    for (auto* sub : {synth, label, cv, train, evaluate, route}) common(sub);
    synth->add_option("--test-count", test_count, "Extra held-out snapshots from the same generator");
    synth->add_option("--test-out", test_out, "Directory for the held-out snapshots");
    route->add_option("--snapshot", snapshot_file, "Snapshot file")->required();
    route->add_option("--umin", umin, "Lower utility bound (percent)");
    route->add_option("--umax", umax, "Upper utility bound (percent)");

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.volumes = pl::parse_volumes(join_commas(volumes));
        if (k_option != "auto") {
            std::size_t k = 0;
            if (!gr::text::parse_size(k_option, k) || k == 0) throw gr::ValidationError("--k must be 'auto' or a positive integer");
            cfg.pca_k = k;
        }
        auto need = [](const std::string& v, const char* flag) {
            if (v.empty()) throw gr::ValidationError(std::string(flag) + " is required");
        };

        if (*synth) {
            need(cfg.topology, "--topology");
            const auto files = pl::cmd_synth(cfg, test_count, test_out);
            std::cout << "wrote " << files.size() << " snapshots\n";
        } else if (*label) {
            need(cfg.topology, "--topology");
            need(cfg.snapshots, "--snapshots");
            const auto labels = pl::cmd_label(cfg);
            std::cout << "labelled " << labels.size() << " snapshot/volume pairs into " << cfg.out << "\n";
        } else if (*cv) {
            const auto r = pl::cmd_cv(cfg);
            std::cout << "chosen k: umin " << r.umin.chosen_k << ", umax " << r.umax.chosen_k << " of "
                      << r.umax.features << " features\n";
        } else if (*train) {
            const auto m = pl::cmd_train(cfg);
            std::cout << "trained models in " << cfg.model_dir() << " (k: umin " << m.umin.pca.k << ", umax "
                      << m.umax.pca.k << ")\n";
        } else if (*evaluate) {
            need(cfg.topology, "--topology");
            need(cfg.snapshots, "--snapshots");
            const auto r = pl::cmd_evaluate(cfg);
            std::cout << "evaluated " << r.rows.size() << " rows into " << cfg.out << "\n";
        } else if (*route) {
            need(cfg.topology, "--topology");
            const auto topo = gr::load_topology(cfg.topology);
            const auto snap = gr::load_snapshot(snapshot_file, topo);
            const auto outcome = gr::route_mept(topo, snap, gr::UtilityInterval{umin, umax}, cfg.paths_k);
            std::cout << gr::outcome_csv(outcome, topo);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
