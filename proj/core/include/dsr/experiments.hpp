#ifndef DSR_EXPERIMENTS_HPP
#define DSR_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dsr/attacks.hpp"
#include "dsr/classifier.hpp"
#include "dsr/config.hpp"

namespace dsr {

struct DatasetBundle {
    LabeledDataset train;
    LabeledDataset test;
};

/// Deterministic synthetic dataset: one smooth cosine-mixture template per
/// class (frequencies keyed by the class index) plus seeded Gaussian pixel
/// noise, clipped to [0,1]; 80/20 train/test split by seeded shuffle. Throws
/// ValueError on specs outside the documented ranges (2..10 classes, size
/// >= 8, per_class >= 5).
DatasetBundle generate_dataset(const DatasetSpec& spec, std::uint64_t seed);

/// One accuracy/PSNR table row. PSNR is measured against the clean input;
/// the clean row reports exactly 100.0.
struct ResultRow {
    std::string label;
    double accuracy_percent = 0.0;
    double mean_psnr_db = 0.0;
    int examples = 0;
};

struct SweepRow {
    int quality = 0; // 0 = no compression
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0; // across seeds (population)
};

struct AblationResult {
    std::vector<double> epsilons;
    std::vector<std::string> labels;               // one per pipeline row
    std::vector<std::vector<double>> accuracy;     // [row][epsilon]
};

// ---------------------------------------------------------------------------
// Experiment drivers. All are pure functions of (config, model, datasets):
// every stochastic choice derives from config.master_seed, so reruns are
// byte-identical.
// ---------------------------------------------------------------------------

/// Clean row plus one row per bundled pipeline: pixel-space FGSM/PGD at their
/// standalone budgets and at the composed budget (for matched-eps reading),
/// compression-only rows, and compress-then-attack rows for every operator.
std::vector<ResultRow> run_attack_table(const ExperimentConfig& cfg, const Classifier& model,
                                        const LabeledDataset& train, const LabeledDataset& test);

/// DSR metrics averaged over planes centered at the first sweep.seeds
/// correctly classified test examples; one plane per seed, reused across all
/// qualities so the comparison is paired. Returns |qualities| x 4 rows.
std::vector<SweepRow> run_quality_sweep(const ExperimentConfig& cfg, const Classifier& model,
                                        const LabeledDataset& test);

/// {clean, compress_only, compress_then_attack, attack_then_compress} at the
/// composed epsilon and composed JPEG quality, FGSM.
std::vector<ResultRow> run_order_experiment(const ExperimentConfig& cfg, const Classifier& model,
                                            const LabeledDataset& test);

/// Accuracy grid over ablation.epsilons for FGSM and PGD, pixel-space and
/// through each composed operator. PGD uses ablation.pgd_iterations steps of
/// size eps/4 with a random start.
AblationResult run_epsilon_ablation(const ExperimentConfig& cfg, const Classifier& model,
                                    const LabeledDataset& train, const LabeledDataset& test);

// CSV emitters for the shapes above.
void emit_result_rows_csv(const std::vector<ResultRow>& rows, const std::string& path);
void emit_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);
void emit_ablation_csv(const AblationResult& result, const std::string& path);

// ---------------------------------------------------------------------------
// Seed derivation (documented so results can be reproduced independently):
// with M = RandomSource(master_seed),
//   dataset generation uses M.child(1), model training M.child(2),
//   attack-table row r uses M.child(100 + r) and example i within a row
//   uses row.child(i + 1); quality-sweep plane k uses M.child(200 + k);
//   order-experiment row r uses M.child(400 + r); the epsilon ablation keys
//   seeds by attack kind a (fgsm=0, pgd=1) and epsilon column c only,
//   M.child(500 + 2*c + a), so the pixel-space row and the compression-aware
//   rows of one column attack each example from identical random starts.
// ---------------------------------------------------------------------------

std::uint64_t dataset_seed(const ExperimentConfig& cfg);
std::uint64_t training_seed(const ExperimentConfig& cfg);

} // namespace dsr

#endif // DSR_EXPERIMENTS_HPP
