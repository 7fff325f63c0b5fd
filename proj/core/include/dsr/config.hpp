#ifndef DSR_CONFIG_HPP
#define DSR_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dsr/classifier.hpp"

namespace dsr {

struct DatasetSpec {
    int size = 16;      // square images, size x size
    int classes = 4;
    int per_class = 500;
    double noise_sigma = 0.08;
};

struct SweepSpec {
    std::vector<int> qualities = {95, 75, 50, 30, 10}; // 0 means "no compression"
    int seeds = 50;       // correctly classified centers to average over
    double radius = 0.35;
    int resolution = 61;
};

struct AblationSpec {
    std::vector<double> epsilons = {0.02, 0.04, 0.06, 0.08};
    int pgd_iterations = 10;
};

/// Everything an experiment run needs, with defaults matching the bundled
/// reference configuration. Parsed from a line-oriented `key = value` file
/// with '#' comments and dotted keys; unknown or malformed keys are rejected.
struct ExperimentConfig {
    DatasetSpec dataset;

    int train_epochs = 30;
    int train_batch_size = 16;
    double train_learning_rate = 0.05;
    std::vector<int> train_hidden = {64, 64};

    // attack defaults (standalone rows)
    double fgsm_eps = 0.01;
    double pgd_eps = 2.0 / 255.0;
    double pgd_alpha = 1.0 / 255.0;
    int pgd_iterations = 5;
    bool pgd_random_start = true;

    // composed (compression-aware) defaults
    double composed_eps = 0.02;
    int composed_pgd_iterations = 10;

    // operator defaults: standalone vs composed-with-attack parameterizations
    int jpeg_quality = 25;
    int jpeg_composed_quality = 55;
    int pca_components = 22;
    int pca_composed_components = 50;
    int patch_size = 8;
    int patch_rank = 3;

    SweepSpec sweep;
    AblationSpec ablation;

    std::uint64_t master_seed = 42;
    std::string out_dir = "out";

    TrainConfig train_config() const {
        TrainConfig tc;
        tc.epochs = train_epochs;
        tc.batch_size = train_batch_size;
        tc.learning_rate = train_learning_rate;
        tc.hidden = train_hidden;
        return tc; // seed is assigned by the harness from the master seed
    }
};

/// Parse config text. Throws ConfigError on unknown keys, duplicate keys,
/// unparsable values, or values outside their documented ranges.
ExperimentConfig parse_config_text(const std::string& text);

/// Read and parse a config file. Throws IoError when unreadable.
ExperimentConfig load_config_file(const std::string& path);

} // namespace dsr

#endif // DSR_CONFIG_HPP
