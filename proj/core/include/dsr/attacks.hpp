#ifndef DSR_ATTACKS_HPP
#define DSR_ATTACKS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "dsr/classifier.hpp"
#include "dsr/compression.hpp"
#include "dsr/image.hpp"

namespace dsr {

struct AttackConfig {
    enum class Kind { fgsm, pgd };

    Kind kind = Kind::fgsm;
    double epsilon = 0.01;      // L-inf budget in pixel units
    double alpha = 1.0 / 255.0; // PGD step size
    int iterations = 5;         // PGD only
    bool random_start = true;   // PGD only
    std::uint64_t seed = 0;     // drives the PGD random start

    /// Short identifier including the budget, e.g. "pgd_eps0.00784314".
    std::string label() const;
};

/// Single-step sign-gradient attack: clip(x + eps*sign(grad loss), 0, 1),
/// with sign(0) = 0 so a dead gradient (or eps = 0) returns x unchanged.
Image fgsm(const Classifier& model, const Image& x, int y, double epsilon);

/// Iterated sign-gradient ascent. Each step adds alpha*sign(grad), projects
/// onto the L-inf ball of radius epsilon around x, then clips to [0,1] (in
/// that order). The optional random start draws per-pixel offsets uniform in
/// [-eps, eps] from a RandomSource seeded with config.seed.
Image pgd(const Classifier& model, const Image& x, int y, const AttackConfig& config);

/// Dispatch on config.kind.
Image run_attack(const Classifier& model, const Image& x, int y, const AttackConfig& config);

enum class PipelineOrder { attack_only, compress_then_attack, attack_then_compress, compress_only };

struct PipelineSpec {
    PipelineOrder order = PipelineOrder::attack_only;
    std::optional<CompressionOperator> op; // required unless attack_only
    AttackConfig attack;

    /// Row label, e.g. "jpeg_q55->fgsm_eps0.02" for compress_then_attack.
    std::string label() const;
};

struct PipelineResult {
    Image adversarial;
    Image reference; // the clean input; PSNR is always measured against it
};

/// Evaluate one pipeline on one example.
///   compress_then_attack: attack centers its eps-ball at C(x); no gradient
///     flows through C (the attack only ever differentiates the classifier).
///   attack_then_compress: C(attack(x)) — the purification order.
/// Throws ConfigError when a compressing order is missing its operator.
PipelineResult run_pipeline(const PipelineSpec& spec, const Classifier& model,
                            const Image& x, int y);

} // namespace dsr

#endif // DSR_ATTACKS_HPP
