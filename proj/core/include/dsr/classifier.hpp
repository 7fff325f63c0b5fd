#ifndef DSR_CLASSIFIER_HPP
#define DSR_CLASSIFIER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dsr/image.hpp"
#include "dsr/matrix.hpp"
#include "dsr/random.hpp"

namespace dsr {

using Logits = std::vector<double>;

/// One affine layer: out = weights * in + bias, weights is (out_dim x in_dim).
struct Layer {
    Matrix weights;
    std::vector<double> bias;
};

/// Fully connected ReLU network on flattened pixels; the last layer is linear
/// and emits one logit per class.
struct Classifier {
    int input_dim = 0;
    int num_classes = 0;
    std::vector<Layer> layers;

    /// Seeded Glorot-uniform weights; hidden biases start at 0.1 so ReLU
    /// units begin active, the output bias at zero. `hidden` lists the hidden
    /// layer widths; an empty list gives a single linear layer.
    static Classifier initialize(int input_dim, int num_classes,
                                 const std::vector<int>& hidden, RandomSource& rng);
};

struct LabeledDataset {
    enum class Split { train, test };

    int height = 0;
    int width = 0;
    int channels = 1;
    int num_classes = 0;
    Split split = Split::train;
    std::vector<Image> images;
    std::vector<int> labels;

    std::size_t size() const { return images.size(); }
};

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

/// Deterministic logits for one image. Throws DimensionError on a size
/// mismatch with the model's input dimension.
Logits forward(const Classifier& model, const Image& x);

/// Argmax with lowest-index tie-break.
int predicted_label(const Logits& logits);

/// Classification margin f_y - max_{k != y} f_k. Positive iff the true class
/// is the unique top-1 prediction. Throws ValueError when K < 2.
double margin(const Logits& logits, int y);

/// Cross-entropy loss of the logits against label y (softmax + NLL,
/// numerically stable).
double cross_entropy(const Logits& logits, int y);

/// Exact reverse-mode gradient of the cross-entropy loss with respect to the
/// input pixels.
Image input_gradient(const Classifier& model, const Image& x, int y);

/// Exact reverse-mode gradient of the margin function with respect to the
/// input pixels (gradient of f_y - f_{k*}, k* the runner-up class).
Image margin_gradient(const Classifier& model, const Image& x, int y);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
    int epochs = 30;
    int batch_size = 16;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    std::vector<int> hidden = {64, 64};
};

struct TrainResult {
    Classifier model;
    std::vector<double> epoch_loss; // mean cross-entropy per epoch
};

/// Minibatch SGD with a seeded shuffle per epoch. Deterministic: the same
/// dataset, config and seed produce bit-identical parameters. Throws
/// ValueError on an empty dataset.
TrainResult train(const LabeledDataset& dataset, const TrainConfig& config);

/// Fraction of examples whose prediction matches the label, in percent.
double accuracy_percent(const Classifier& model, const LabeledDataset& dataset);

// ---------------------------------------------------------------------------
// Checkpoint IO
// ---------------------------------------------------------------------------
//
// Byte layout (all integers and floats little-endian):
//   magic    8 bytes  "DSRCKPT1"
//   version  u32      1
//   input    u32
//   classes  u32
//   layers   u32      layer count L
//   shapes   L x (u32 out_dim, u32 in_dim)
//   params   per layer: weights row-major f64[out*in], bias f64[out]
//
// Bad magic or version -> FormatError; any length mismatch -> CorruptionError.

std::vector<std::uint8_t> save_checkpoint(const Classifier& model);
Classifier load_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint_file(const Classifier& model, const std::string& path);
Classifier load_checkpoint_file(const std::string& path);

} // namespace dsr

#endif // DSR_CLASSIFIER_HPP
