// Command-line front end: dataset generation, training, and the experiment
// drivers, each writing its artifacts under --out.
//
// Exit codes: 0 success, 2 configuration problem, 3 runtime failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dsr/classifier.hpp"
#include "dsr/config.hpp"
#include "dsr/errors.hpp"
#include "dsr/experiments.hpp"
#include "dsr/geometry.hpp"
#include "dsr/io.hpp"
#include "dsr/random.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
};

void attach_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config_path, "experiment config file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", common.seed, "master seed (overrides the config)");
    cmd->add_option("--out", common.out, "output directory (overrides the config)");
}

dsr::ExperimentConfig resolve_config(const CLI::App* cmd, const Common& common) {
    dsr::ExperimentConfig cfg;
    if (!common.config_path.empty())
        cfg = dsr::load_config_file(common.config_path);
    if (cmd->count("--seed") > 0)
        cfg.master_seed = common.seed;
    if (cmd->count("--out") > 0)
        cfg.out_dir = common.out;
    fs::create_directories(cfg.out_dir);
    return cfg;
}

std::string path_in(const dsr::ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

dsr::DatasetBundle load_bundle(const dsr::ExperimentConfig& cfg) {
    const std::string train_path = path_in(cfg, "train.ds");
    const std::string test_path = path_in(cfg, "test.ds");
    if (!fs::exists(train_path) || !fs::exists(test_path))
        throw dsr::StateError("dataset files not found in '" + cfg.out_dir +
                              "'; run `dsr gen-data` first");
    return {dsr::load_dataset_file(train_path), dsr::load_dataset_file(test_path)};
}

dsr::Classifier load_model(const dsr::ExperimentConfig& cfg) {
    const std::string model_path = path_in(cfg, "model.ckpt");
    if (!fs::exists(model_path))
        throw dsr::StateError("model checkpoint not found in '" + cfg.out_dir +
                              "'; run `dsr train` first");
    return dsr::load_checkpoint_file(model_path);
}

void cmd_gen_data(const dsr::ExperimentConfig& cfg) {
    const dsr::DatasetBundle bundle =
        dsr::generate_dataset(cfg.dataset, dsr::dataset_seed(cfg));
    dsr::save_dataset_file(bundle.train, path_in(cfg, "train.ds"));
    dsr::save_dataset_file(bundle.test, path_in(cfg, "test.ds"));
    std::cout << "wrote " << bundle.train.size() << " train / " << bundle.test.size()
              << " test examples (" << cfg.dataset.classes << " classes, "
              << cfg.dataset.size << "x" << cfg.dataset.size << ")\n";
}

void cmd_train(const dsr::ExperimentConfig& cfg) {
    const dsr::DatasetBundle bundle = load_bundle(cfg);
    dsr::TrainConfig tc = cfg.train_config();
    tc.seed = dsr::training_seed(cfg);
    const dsr::TrainResult result = dsr::train(bundle.train, tc);
    dsr::save_checkpoint_file(result.model, path_in(cfg, "model.ckpt"));

    std::vector<std::vector<std::string>> rows;
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
        rows.push_back({std::to_string(e + 1), dsr::format_g6(result.epoch_loss[e])});
    if (!rows.empty())
        dsr::emit_csv(path_in(cfg, "train_log.csv"), {"epoch", "mean_loss"}, rows);

    std::cout << "trained " << tc.epochs << " epochs; train accuracy "
              << dsr::format_g6(dsr::accuracy_percent(result.model, bundle.train))
              << "%, test accuracy "
              << dsr::format_g6(dsr::accuracy_percent(result.model, bundle.test)) << "%\n";
}

void cmd_attack_table(const dsr::ExperimentConfig& cfg) {
    const dsr::DatasetBundle bundle = load_bundle(cfg);
    const dsr::Classifier model = load_model(cfg);
    const auto rows = dsr::run_attack_table(cfg, model, bundle.train, bundle.test);
    dsr::emit_result_rows_csv(rows, path_in(cfg, "attack_table.csv"));
    std::cout << "wrote attack_table.csv (" << rows.size() << " rows)\n";
}

void cmd_dsr_sweep(const dsr::ExperimentConfig& cfg) {
    const dsr::DatasetBundle bundle = load_bundle(cfg);
    const dsr::Classifier model = load_model(cfg);
    const auto rows = dsr::run_quality_sweep(cfg, model, bundle.test);
    dsr::emit_sweep_csv(rows, path_in(cfg, "dsr_sweep.csv"));
    std::cout << "wrote dsr_sweep.csv (" << rows.size() << " rows)\n";
}

void cmd_order_exp(const dsr::ExperimentConfig& cfg) {
    const dsr::DatasetBundle bundle = load_bundle(cfg);
    const dsr::Classifier model = load_model(cfg);
    const auto rows = dsr::run_order_experiment(cfg, model, bundle.test);
    dsr::emit_result_rows_csv(rows, path_in(cfg, "order_experiment.csv"));
    std::cout << "wrote order_experiment.csv (" << rows.size() << " rows)\n";
}

void cmd_eps_ablation(const dsr::ExperimentConfig& cfg) {
    const dsr::DatasetBundle bundle = load_bundle(cfg);
    const dsr::Classifier model = load_model(cfg);
    const auto result = dsr::run_epsilon_ablation(cfg, model, bundle.train, bundle.test);
    dsr::emit_ablation_csv(result, path_in(cfg, "eps_ablation.csv"));
    std::cout << "wrote eps_ablation.csv (" << result.labels.size() << " rows x "
              << result.epsilons.size() << " budgets)\n";
}

void cmd_plane(const dsr::ExperimentConfig& cfg, int quality, int index) {
    if (quality < 0 || quality > 100)
        throw dsr::ConfigError("plane: --quality must be 0 (none) or 1..100");
    if (index < 0)
        throw dsr::ConfigError("plane: --index must be >= 0");

    const dsr::DatasetBundle bundle = load_bundle(cfg);
    const dsr::Classifier model = load_model(cfg);
    const dsr::LabeledDataset& test = bundle.test;

    // The index-th correctly classified test example, matching the sweep's
    // center selection (and its plane seed derivation).
    int seen = -1;
    std::size_t center = test.size();
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (dsr::predicted_label(dsr::forward(model, test.images[i])) == test.labels[i]) {
            if (++seen == index) {
                center = i;
                break;
            }
        }
    }
    if (center == test.size())
        throw dsr::StateError("plane: fewer than " + std::to_string(index + 1) +
                              " correctly classified test examples");

    dsr::RandomSource plane_rng =
        dsr::RandomSource(cfg.master_seed).child(200 + static_cast<std::uint64_t>(index));
    const dsr::PlaneSpec spec =
        dsr::build_plane(model, test.images[center], test.labels[center], plane_rng,
                         cfg.sweep.radius, cfg.sweep.resolution);

    dsr::CompressionOperator op = dsr::CompressionOperator::identity();
    const dsr::CompressionOperator* op_ptr = nullptr;
    std::string tag = "none";
    if (quality > 0) {
        op = dsr::CompressionOperator::jpeg_like(quality);
        op_ptr = &op;
        tag = "q" + std::to_string(quality);
    }
    const dsr::PlaneGrid grid = dsr::evaluate_grid(model, op_ptr, spec);
    const std::string prefix = path_in(cfg, "plane_" + tag);
    dsr::emit_heatmap(grid, prefix);
    std::cout << "wrote " << prefix << ".ppm/.pgm and sidecar\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compression-aware adversarial attacks and decision-space metrics"};
    app.require_subcommand(1);

    Common common;
    int plane_quality = 0;
    int plane_index = 0;

    CLI::App* gen = app.add_subcommand("gen-data", "generate the synthetic dataset");
    CLI::App* train = app.add_subcommand("train", "train the classifier on the generated data");
    CLI::App* table = app.add_subcommand("attack-table", "accuracy/PSNR table over all pipelines");
    CLI::App* sweep = app.add_subcommand("dsr-sweep", "decision-space metrics vs JPEG quality");
    CLI::App* order = app.add_subcommand("order-exp", "attack/compression order comparison");
    CLI::App* ablation = app.add_subcommand("eps-ablation", "accuracy vs perturbation budget");
    CLI::App* plane = app.add_subcommand("plane", "emit one decision-plane heatmap");
    plane->add_option("--quality", plane_quality, "JPEG quality in the loop (0 = none)");
    plane->add_option("--index", plane_index, "which correctly classified example to slice");

    for (CLI::App* cmd : {gen, train, table, sweep, order, ablation, plane})
        attach_common(cmd, common);

    gen->callback([&] { cmd_gen_data(resolve_config(gen, common)); });
    train->callback([&] { cmd_train(resolve_config(train, common)); });
    table->callback([&] { cmd_attack_table(resolve_config(table, common)); });
    sweep->callback([&] { cmd_dsr_sweep(resolve_config(sweep, common)); });
    order->callback([&] { cmd_order_exp(resolve_config(order, common)); });
    ablation->callback([&] { cmd_eps_ablation(resolve_config(ablation, common)); });
    plane->callback([&] { cmd_plane(resolve_config(plane, common), plane_quality, plane_index); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // bad usage is a configuration problem
    } catch (const dsr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
