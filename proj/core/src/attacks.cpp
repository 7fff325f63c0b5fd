#include "dsr/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dsr/errors.hpp"
#include "dsr/random.hpp"

namespace dsr {

namespace {

double sign0(double v) {
    if (v > 0.0)
        return 1.0;
    if (v < 0.0)
        return -1.0;
    return 0.0;
}

std::string format_eps(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", eps);
    return buf;
}

} // namespace

std::string AttackConfig::label() const {
    const char* name = kind == Kind::fgsm ? "fgsm" : "pgd";
    return std::string(name) + "_eps" + format_eps(epsilon);
}

Image fgsm(const Classifier& model, const Image& x, int y, double epsilon) {
    if (epsilon < 0.0 || !std::isfinite(epsilon))
        throw ValueError("fgsm: epsilon must be finite and >= 0");
    Image grad = input_gradient(model, x, y);
    Image out = x;
    for (std::size_t j = 0; j < out.values.size(); ++j)
        out.values[j] = std::clamp(x.values[j] + epsilon * sign0(grad.values[j]), 0.0, 1.0);
    return out;
}

Image pgd(const Classifier& model, const Image& x, int y, const AttackConfig& config) {
    if (config.epsilon < 0.0 || !std::isfinite(config.epsilon))
        throw ValueError("pgd: epsilon must be finite and >= 0");
    if (!(config.alpha > 0.0) || !std::isfinite(config.alpha))
        throw ValueError("pgd: alpha must be finite and > 0");
    if (config.iterations < 1)
        throw ValueError("pgd: iterations must be >= 1");

    const std::size_t d = x.values.size();
    Image current = x;
    if (config.random_start) {
        RandomSource rng(config.seed);
        for (std::size_t j = 0; j < d; ++j) {
            const double offset = (2.0 * rng.uniform01() - 1.0) * config.epsilon;
            current.values[j] = std::clamp(x.values[j] + offset, 0.0, 1.0);
        }
    }
    for (int it = 0; it < config.iterations; ++it) {
        Image grad = input_gradient(model, current, y);
        for (std::size_t j = 0; j < d; ++j) {
            double v = current.values[j] + config.alpha * sign0(grad.values[j]);
            // Project back onto the eps-ball around x, then clip to the pixel
            // range — the order matters.
            v = std::min(std::max(v, x.values[j] - config.epsilon), x.values[j] + config.epsilon);
            current.values[j] = std::clamp(v, 0.0, 1.0);
        }
    }
    return current;
}

Image run_attack(const Classifier& model, const Image& x, int y, const AttackConfig& config) {
    if (config.kind == AttackConfig::Kind::fgsm)
        return fgsm(model, x, y, config.epsilon);
    return pgd(model, x, y, config);
}

std::string PipelineSpec::label() const {
    switch (order) {
    case PipelineOrder::attack_only:
        return attack.label();
    case PipelineOrder::compress_only:
        return op ? op->label() : "compress_only";
    case PipelineOrder::compress_then_attack:
        return (op ? op->label() : "?") + "->" + attack.label();
    case PipelineOrder::attack_then_compress:
        return attack.label() + "->" + (op ? op->label() : "?");
    }
    return "?";
}

PipelineResult run_pipeline(const PipelineSpec& spec, const Classifier& model,
                            const Image& x, int y) {
    const bool needs_op = spec.order != PipelineOrder::attack_only;
    if (needs_op && !spec.op)
        throw ConfigError("pipeline '" + spec.label() + "' needs a compression operator");

    PipelineResult result;
    result.reference = x;
    switch (spec.order) {
    case PipelineOrder::attack_only:
        result.adversarial = run_attack(model, x, y, spec.attack);
        break;
    case PipelineOrder::compress_only:
        result.adversarial = spec.op->apply(x);
        break;
    case PipelineOrder::compress_then_attack: {
        const Image z = spec.op->apply(x);
        result.adversarial = run_attack(model, z, y, spec.attack);
        break;
    }
    case PipelineOrder::attack_then_compress:
        result.adversarial = spec.op->apply(run_attack(model, x, y, spec.attack));
        break;
    }
    return result;
}

} // namespace dsr
