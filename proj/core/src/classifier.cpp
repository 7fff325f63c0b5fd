#include "dsr/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "dsr/errors.hpp"
#include "dsr/numerics.hpp"

namespace dsr {

namespace {

// Forward pass keeping every intermediate needed for reverse mode.
struct ForwardTrace {
    // activations[0] is the flattened input; activations[i] is the output of
    // layer i-1 after its nonlinearity (the last entry holds raw logits).
    std::vector<std::vector<double>> activations;
};

std::vector<double> flatten(const Image& x) {
    return x.values;
}

void affine(const Layer& layer, const std::vector<double>& in, std::vector<double>& out) {
    const std::size_t rows = layer.weights.rows();
    const std::size_t cols = layer.weights.cols();
    out.assign(rows, 0.0);
    const double* weights = layer.weights.data().data();
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = layer.bias[r];
        const double* w = weights + r * cols;
        for (std::size_t c = 0; c < cols; ++c)
            acc += w[c] * in[c];
        out[r] = acc;
    }
}

ForwardTrace run_forward(const Classifier& model, const Image& x) {
    if (static_cast<int>(x.values.size()) != model.input_dim)
        throw DimensionError("forward: image has " + std::to_string(x.values.size()) +
                             " values, model expects " + std::to_string(model.input_dim));
    ForwardTrace trace;
    trace.activations.reserve(model.layers.size() + 1);
    trace.activations.push_back(flatten(x));
    std::vector<double> buf;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        affine(model.layers[i], trace.activations.back(), buf);
        if (i + 1 < model.layers.size()) {
            for (double& v : buf)
                v = v > 0.0 ? v : 0.0;
        }
        trace.activations.push_back(buf);
    }
    return trace;
}

// Per-layer parameter gradients, allocated lazily by the trainer.
struct GradBuffers {
    std::vector<std::vector<double>> weight; // row-major, same shape as layer
    std::vector<std::vector<double>> bias;

    void resize_like(const Classifier& model) {
        weight.resize(model.layers.size());
        bias.resize(model.layers.size());
        for (std::size_t i = 0; i < model.layers.size(); ++i) {
            weight[i].assign(model.layers[i].weights.size(), 0.0);
            bias[i].assign(model.layers[i].bias.size(), 0.0);
        }
    }
    void zero() {
        for (auto& w : weight)
            std::fill(w.begin(), w.end(), 0.0);
        for (auto& b : bias)
            std::fill(b.begin(), b.end(), 0.0);
    }
};

// Backpropagate dlogits through the network. Returns the input gradient and,
// when `grads` is non-null, accumulates parameter gradients into it.
std::vector<double> run_backward(const Classifier& model, const ForwardTrace& trace,
                                 std::vector<double> delta, GradBuffers* grads) {
    for (std::size_t li = model.layers.size(); li-- > 0;) {
        const Layer& layer = model.layers[li];
        const std::vector<double>& in = trace.activations[li];
        const std::size_t rows = layer.weights.rows();
        const std::size_t cols = layer.weights.cols();

        if (grads != nullptr) {
            std::vector<double>& gw = grads->weight[li];
            std::vector<double>& gb = grads->bias[li];
            for (std::size_t r = 0; r < rows; ++r) {
                const double d = delta[r];
                if (d == 0.0)
                    continue;
                gb[r] += d;
                double* grow = gw.data() + r * cols;
                for (std::size_t c = 0; c < cols; ++c)
                    grow[c] += d * in[c];
            }
        }

        std::vector<double> prev(cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            const double d = delta[r];
            if (d == 0.0)
                continue;
            const double* w = layer.weights.data().data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c)
                prev[c] += d * w[c];
        }
        if (li > 0) {
            // in == ReLU output of the previous layer; its derivative is the
            // 0/1 mask of that output (subgradient 0 at the kink).
            for (std::size_t c = 0; c < cols; ++c) {
                if (in[c] <= 0.0)
                    prev[c] = 0.0;
            }
        }
        delta = std::move(prev);
    }
    return delta;
}

std::vector<double> softmax(const Logits& logits) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double total = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        p[k] = std::exp(logits[k] - peak);
        total += p[k];
    }
    for (double& v : p)
        v /= total;
    return p;
}

void check_label(int y, std::size_t num_classes, const char* where) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
        throw ValueError(std::string(where) + ": label " + std::to_string(y) +
                         " out of range for " + std::to_string(num_classes) + " classes");
}

int runner_up(const Logits& logits, int y) {
    int best = -1;
    for (int k = 0; k < static_cast<int>(logits.size()); ++k) {
        if (k == y)
            continue;
        if (best < 0 || logits[k] > logits[best])
            best = k;
    }
    return best;
}

} // namespace

Classifier Classifier::initialize(int input_dim, int num_classes,
                                  const std::vector<int>& hidden, RandomSource& rng) {
    if (input_dim <= 0 || num_classes < 2)
        throw ValueError("Classifier::initialize: need input_dim >= 1 and num_classes >= 2");
    for (int h : hidden) {
        if (h <= 0)
            throw ValueError("Classifier::initialize: hidden widths must be positive");
    }
    Classifier model;
    model.input_dim = input_dim;
    model.num_classes = num_classes;

    std::vector<int> widths;
    widths.push_back(input_dim);
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(num_classes);

    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const int fan_in = widths[i];
        const int fan_out = widths[i + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        Layer layer;
        layer.weights = Matrix(fan_out, fan_in);
        for (std::size_t j = 0; j < layer.weights.size(); ++j)
            layer.weights[j] = (2.0 * rng.uniform01() - 1.0) * limit;
        // Hidden biases start slightly positive so ReLU units begin active;
        // with all-positive pixel inputs a zero start is prone to whole-layer
        // die-off under SGD. The output layer keeps zero bias.
        const bool is_output = (i + 2 == widths.size());
        layer.bias.assign(fan_out, is_output ? 0.0 : 0.1);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

Logits forward(const Classifier& model, const Image& x) {
    ForwardTrace trace = run_forward(model, x);
    return trace.activations.back();
}

int predicted_label(const Logits& logits) {
    if (logits.empty())
        throw ValueError("predicted_label: empty logits");
    int best = 0;
    for (int k = 1; k < static_cast<int>(logits.size()); ++k) {
        if (logits[k] > logits[best])
            best = k;
    }
    return best;
}

double margin(const Logits& logits, int y) {
    if (logits.size() < 2)
        throw ValueError("margin: need at least two classes");
    check_label(y, logits.size(), "margin");
    return logits[y] - logits[runner_up(logits, y)];
}

double cross_entropy(const Logits& logits, int y) {
    check_label(y, logits.size(), "cross_entropy");
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double v : logits)
        total += std::exp(v - peak);
    return std::log(total) + peak - logits[y];
}

Image input_gradient(const Classifier& model, const Image& x, int y) {
    check_label(y, static_cast<std::size_t>(model.num_classes), "input_gradient");
    ForwardTrace trace = run_forward(model, x);
    std::vector<double> delta = softmax(trace.activations.back());
    delta[y] -= 1.0;
    Image grad = x;
    grad.values = run_backward(model, trace, std::move(delta), nullptr);
    return grad;
}

Image margin_gradient(const Classifier& model, const Image& x, int y) {
    check_label(y, static_cast<std::size_t>(model.num_classes), "margin_gradient");
    ForwardTrace trace = run_forward(model, x);
    const int k = runner_up(trace.activations.back(), y);
    std::vector<double> delta(model.num_classes, 0.0);
    delta[y] = 1.0;
    delta[k] = -1.0;
    Image grad = x;
    grad.values = run_backward(model, trace, std::move(delta), nullptr);
    return grad;
}

TrainResult train(const LabeledDataset& dataset, const TrainConfig& config) {
    if (dataset.size() == 0)
        throw ValueError("train: empty dataset");
    if (dataset.images.size() != dataset.labels.size())
        throw ValueError("train: image/label count mismatch");
    if (config.epochs < 0 || config.batch_size < 1 || config.learning_rate <= 0.0)
        throw ValueError("train: epochs >= 0, batch_size >= 1, learning_rate > 0 required");

    const int input_dim = dataset.height * dataset.width * dataset.channels;
    RandomSource rng(config.seed);
    RandomSource init_rng = rng.child(1);
    RandomSource shuffle_rng = rng.child(2);

    TrainResult result;
    result.model = Classifier::initialize(input_dim, dataset.num_classes, config.hidden, init_rng);
    Classifier& model = result.model;

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    GradBuffers grads;
    grads.resize_like(model);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        std::vector<double> losses;
        losses.reserve(dataset.size());

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            grads.zero();
            for (std::size_t i = start; i < stop; ++i) {
                const std::size_t idx = order[i];
                ForwardTrace trace = run_forward(model, dataset.images[idx]);
                const Logits& logits = trace.activations.back();
                losses.push_back(cross_entropy(logits, dataset.labels[idx]));
                std::vector<double> delta = softmax(logits);
                delta[dataset.labels[idx]] -= 1.0;
                run_backward(model, trace, std::move(delta), &grads);
            }
            const double scale = config.learning_rate / static_cast<double>(stop - start);
            for (std::size_t li = 0; li < model.layers.size(); ++li) {
                Layer& layer = model.layers[li];
                for (std::size_t j = 0; j < layer.weights.size(); ++j)
                    layer.weights[j] -= scale * grads.weight[li][j];
                for (std::size_t j = 0; j < layer.bias.size(); ++j)
                    layer.bias[j] -= scale * grads.bias[li][j];
            }
        }
        result.epoch_loss.push_back(compensated_sum(losses) / static_cast<double>(losses.size()));
    }
    return result;
}

double accuracy_percent(const Classifier& model, const LabeledDataset& dataset) {
    if (dataset.size() == 0)
        throw ValueError("accuracy_percent: empty dataset");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (predicted_label(forward(model, dataset.images[i])) == dataset.labels[i])
            ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(dataset.size());
}

// ---------------------------------------------------------------------------
// Checkpoint IO
// ---------------------------------------------------------------------------

namespace {

constexpr char kCheckpointMagic[8] = {'D', 'S', 'R', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
}

struct ByteReader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > bytes.size())
            throw CorruptionError("checkpoint: truncated payload");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
        pos += 8;
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
};

} // namespace

std::vector<std::uint8_t> save_checkpoint(const Classifier& model) {
    if (model.layers.empty())
        throw ValueError("save_checkpoint: model has no layers");
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kCheckpointMagic, kCheckpointMagic + 8);
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(model.input_dim));
    put_u32(out, static_cast<std::uint32_t>(model.num_classes));
    put_u32(out, static_cast<std::uint32_t>(model.layers.size()));
    for (const Layer& layer : model.layers) {
        put_u32(out, static_cast<std::uint32_t>(layer.weights.rows()));
        put_u32(out, static_cast<std::uint32_t>(layer.weights.cols()));
    }
    for (const Layer& layer : model.layers) {
        for (std::size_t j = 0; j < layer.weights.size(); ++j)
            put_f64(out, layer.weights[j]);
        for (double b : layer.bias)
            put_f64(out, b);
    }
    return out;
}

Classifier load_checkpoint(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0)
        throw FormatError("checkpoint: bad magic");
    ByteReader reader{bytes, 8};
    const std::uint32_t version = reader.u32();
    if (version != kCheckpointVersion)
        throw FormatError("checkpoint: unsupported version " + std::to_string(version));

    Classifier model;
    model.input_dim = static_cast<int>(reader.u32());
    model.num_classes = static_cast<int>(reader.u32());
    const std::uint32_t num_layers = reader.u32();
    if (model.input_dim <= 0 || model.num_classes < 2 || num_layers == 0 || num_layers > 64)
        throw CorruptionError("checkpoint: implausible header fields");

    std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes(num_layers);
    for (auto& shape : shapes) {
        shape.first = reader.u32();
        shape.second = reader.u32();
        if (shape.first == 0 || shape.second == 0)
            throw CorruptionError("checkpoint: zero layer dimension");
    }
    if (shapes.front().second != static_cast<std::uint32_t>(model.input_dim) ||
        shapes.back().first != static_cast<std::uint32_t>(model.num_classes))
        throw CorruptionError("checkpoint: layer shapes disagree with header");
    for (std::size_t i = 0; i + 1 < shapes.size(); ++i) {
        if (shapes[i + 1].second != shapes[i].first)
            throw CorruptionError("checkpoint: layer shapes do not chain");
    }

    for (const auto& shape : shapes) {
        Layer layer;
        layer.weights = Matrix(shape.first, shape.second);
        for (std::size_t j = 0; j < layer.weights.size(); ++j)
            layer.weights[j] = reader.f64();
        layer.bias.resize(shape.first);
        for (double& b : layer.bias)
            b = reader.f64();
        model.layers.push_back(std::move(layer));
    }
    if (reader.pos != bytes.size())
        throw CorruptionError("checkpoint: trailing bytes after parameters");
    return model;
}

void save_checkpoint_file(const Classifier& model, const std::string& path) {
    const std::vector<std::uint8_t> bytes = save_checkpoint(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("short write: " + path);
}

Classifier load_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return load_checkpoint(bytes);
}

} // namespace dsr
