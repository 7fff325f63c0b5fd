#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dsr/attacks.hpp"
#include "dsr/classifier.hpp"
#include "dsr/compression.hpp"
#include "dsr/errors.hpp"
#include "dsr/random.hpp"

#include "oracles.hpp"

using namespace dsr;

namespace {

Classifier seeded_model(int input_dim, int num_classes, const std::vector<int>& hidden,
                        std::uint64_t seed) {
    RandomSource rng(seed);
    return Classifier::initialize(input_dim, num_classes, hidden, rng);
}

Classifier zero_model(int input_dim, int num_classes) {
    RandomSource rng(0);
    Classifier m = Classifier::initialize(input_dim, num_classes, {}, rng);
    std::fill(m.layers[0].weights.data().begin(), m.layers[0].weights.data().end(), 0.0);
    std::fill(m.layers[0].bias.begin(), m.layers[0].bias.end(), 0.0);
    return m;
}

Image seeded_image(int h, int w, RandomSource& rng, double lo = 0.0, double hi = 1.0) {
    Image x(h, w);
    for (double& v : x.values)
        v = rng.uniform(lo, hi);
    return x;
}

double linf_dist(const Image& a, const Image& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

bool in_unit_range(const Image& x) {
    return std::all_of(x.values.begin(), x.values.end(),
                       [](double v) { return v >= 0.0 && v <= 1.0; });
}

} // namespace

// ---------------------------------------------------------------------------
// FGSM
// ---------------------------------------------------------------------------

TEST_CASE("fgsm with a zero budget returns the input bit-identically") {
    RandomSource rng(601);
    const Classifier m = seeded_model(16, 3, {8}, 602);
    const Image x = seeded_image(4, 4, rng);
    const Image adv = fgsm(m, x, 1, 0.0);
    CHECK(adv.values == x.values);
}

TEST_CASE("fgsm against a dead gradient returns the input (sign(0) = 0)") {
    const Classifier m = zero_model(16, 3);
    RandomSource rng(603);
    const Image x = seeded_image(4, 4, rng);
    const Image adv = fgsm(m, x, 0, 0.05);
    CHECK(adv.values == x.values);
}

TEST_CASE("fgsm moves every interior pixel by exactly eps in the gradient sign") {
    RandomSource rng(604);
    Classifier m;
    m.input_dim = 9;
    m.num_classes = 3;
    Layer layer;
    layer.weights = Matrix(3, 9);
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
        layer.weights[i] = rng.uniform(-1.0, 1.0);
    layer.bias = {0.0, 0.1, -0.1};
    m.layers.push_back(layer);

    const Image x = seeded_image(3, 3, rng, 0.3, 0.7); // interior: no clipping
    const int y = 1;
    const double eps = 0.05;
    const std::vector<double> grad =
        oracles::linear_softmax_gradient(m.layers[0].weights, m.layers[0].bias, x, y);
    const Image adv = fgsm(m, x, y, eps);
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        if (grad[i] == 0.0)
            continue;
        const double expected = x.values[i] + (grad[i] > 0.0 ? eps : -eps);
        CHECK(std::abs(adv.values[i] - expected) <= 1e-12);
    }
}

TEST_CASE("fgsm output respects the budget and the pixel range") {
    RandomSource rng(605);
    const Classifier m = seeded_model(16, 4, {10}, 606);
    for (int trial = 0; trial < 25; ++trial) {
        const Image x = seeded_image(4, 4, rng);
        const int y = static_cast<int>(rng.next_below(4));
        const double eps = rng.uniform(0.0, 0.2);
        const Image adv = fgsm(m, x, y, eps);
        CHECK(linf_dist(adv, x) <= eps + 1e-12);
        CHECK(in_unit_range(adv));
    }
}

TEST_CASE("fgsm rejects a negative budget") {
    const Classifier m = seeded_model(4, 2, {}, 607);
    CHECK_THROWS_AS(fgsm(m, Image(2, 2, 1, 0.5), 0, -0.1), ValueError);
}

// ---------------------------------------------------------------------------
// PGD
// ---------------------------------------------------------------------------

TEST_CASE("single-step pgd with alpha = eps and no random start reduces to fgsm") {
    RandomSource rng(608);
    for (int trial = 0; trial < 100; ++trial) {
        const Classifier m = seeded_model(16, 3, {6}, 700 + static_cast<std::uint64_t>(trial));
        const Image x = seeded_image(4, 4, rng);
        const int y = static_cast<int>(rng.next_below(3));
        const double eps = rng.uniform(0.005, 0.1);

        AttackConfig config;
        config.kind = AttackConfig::Kind::pgd;
        config.epsilon = eps;
        config.alpha = eps;
        config.iterations = 1;
        config.random_start = false;

        const Image via_pgd = pgd(m, x, y, config);
        const Image via_fgsm = fgsm(m, x, y, eps);
        CHECK(via_pgd.values == via_fgsm.values); // bit-identical
    }
}

TEST_CASE("pgd with a zero budget returns the input bit-identically") {
    RandomSource rng(609);
    const Classifier m = seeded_model(16, 3, {8}, 610);
    const Image x = seeded_image(4, 4, rng);
    AttackConfig config;
    config.kind = AttackConfig::Kind::pgd;
    config.epsilon = 0.0;
    CHECK(pgd(m, x, 2, config).values == x.values);
}

TEST_CASE("pgd output respects the budget and range for any start") {
    RandomSource rng(611);
    const Classifier m = seeded_model(16, 4, {10}, 612);
    for (bool random_start : {false, true}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Image x = seeded_image(4, 4, rng);
            const int y = static_cast<int>(rng.next_below(4));
            AttackConfig config;
            config.kind = AttackConfig::Kind::pgd;
            config.epsilon = rng.uniform(0.01, 0.1);
            config.alpha = config.epsilon / 4.0;
            config.iterations = 5;
            config.random_start = random_start;
            config.seed = 1000 + static_cast<std::uint64_t>(trial);
            const Image adv = pgd(m, x, y, config);
            CHECK(linf_dist(adv, x) <= config.epsilon + 1e-12);
            CHECK(in_unit_range(adv));
        }
    }
}

TEST_CASE("pgd does not decrease the training loss it ascends") {
    RandomSource rng(613);
    const Classifier m = seeded_model(16, 3, {12}, 614);
    int improved = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Image x = seeded_image(4, 4, rng);
        const int y = static_cast<int>(rng.next_below(3));
        AttackConfig config;
        config.kind = AttackConfig::Kind::pgd;
        config.epsilon = 0.05;
        config.alpha = 0.0125;
        config.iterations = 10;
        config.random_start = false;
        const Image adv = pgd(m, x, y, config);
        const double before = cross_entropy(forward(m, x), y);
        const double after = cross_entropy(forward(m, adv), y);
        if (after >= before - 1e-12)
            ++improved;
    }
    CHECK(improved == 20);
}

TEST_CASE("pgd is deterministic for equal seeds and differs across seeds") {
    RandomSource rng(615);
    const Classifier m = seeded_model(16, 3, {8}, 616);
    const Image x = seeded_image(4, 4, rng);
    AttackConfig config;
    config.kind = AttackConfig::Kind::pgd;
    config.epsilon = 0.05;
    config.alpha = 0.0125;
    config.iterations = 3;
    config.random_start = true;
    config.seed = 7;
    const Image a = pgd(m, x, 1, config);
    const Image b = pgd(m, x, 1, config);
    CHECK(a.values == b.values);
    config.seed = 8;
    const Image c = pgd(m, x, 1, config);
    CHECK(a.values != c.values);
}

TEST_CASE("attack configs validate their parameters") {
    const Classifier m = seeded_model(4, 2, {}, 617);
    const Image x(2, 2, 1, 0.5);
    AttackConfig bad;
    bad.kind = AttackConfig::Kind::pgd;
    bad.epsilon = 0.05;
    bad.alpha = -1.0;
    CHECK_THROWS_AS(pgd(m, x, 0, bad), ValueError);
    bad.alpha = 0.01;
    bad.iterations = 0;
    CHECK_THROWS_AS(pgd(m, x, 0, bad), ValueError);
}

TEST_CASE("attack labels encode kind and budget") {
    AttackConfig config;
    config.kind = AttackConfig::Kind::fgsm;
    config.epsilon = 0.02;
    CHECK(config.label() == "fgsm_eps0.02");
    config.kind = AttackConfig::Kind::pgd;
    config.epsilon = 2.0 / 255.0;
    CHECK(config.label() == "pgd_eps0.00784314");
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

TEST_CASE("compress_then_attack with the identity operator equals attack_only") {
    RandomSource rng(618);
    const Classifier m = seeded_model(16, 3, {8}, 619);
    const Image x = seeded_image(4, 4, rng);
    const int y = 1;

    PipelineSpec plain;
    plain.order = PipelineOrder::attack_only;
    plain.attack.epsilon = 0.03;

    PipelineSpec composed = plain;
    composed.order = PipelineOrder::compress_then_attack;
    composed.op = CompressionOperator::identity();

    const PipelineResult a = run_pipeline(plain, m, x, y);
    const PipelineResult b = run_pipeline(composed, m, x, y);
    CHECK(a.adversarial.values == b.adversarial.values);
    CHECK(a.reference.values == x.values);
    CHECK(b.reference.values == x.values);
}

TEST_CASE("compress_then_attack with a zero budget returns the compressed image") {
    RandomSource rng(620);
    const Classifier m = seeded_model(256, 3, {8}, 621);
    const Image x = seeded_image(16, 16, rng);

    PipelineSpec spec;
    spec.order = PipelineOrder::compress_then_attack;
    spec.op = CompressionOperator::jpeg_like(55);
    spec.attack.epsilon = 0.0;

    const PipelineResult result = run_pipeline(spec, m, x, 0);
    const Image compressed = spec.op->apply(x);
    CHECK(result.adversarial.values == compressed.values);
}

TEST_CASE("compress_then_attack centers its budget at the compressed image") {
    RandomSource rng(622);
    const Classifier m = seeded_model(256, 4, {16}, 623);
    for (int trial = 0; trial < 10; ++trial) {
        const Image x = seeded_image(16, 16, rng);
        const int y = static_cast<int>(rng.next_below(4));
        PipelineSpec spec;
        spec.order = PipelineOrder::compress_then_attack;
        spec.op = CompressionOperator::jpeg_like(55);
        spec.attack.epsilon = 0.02;
        const PipelineResult result = run_pipeline(spec, m, x, y);
        const Image compressed = spec.op->apply(x);
        CHECK(linf_dist(result.adversarial, compressed) <= 0.02 + 1e-12);
        CHECK(in_unit_range(result.adversarial));
        CHECK(result.reference.values == x.values);
    }
}

TEST_CASE("attack_then_compress applies the operator to the attacked image") {
    RandomSource rng(624);
    const Classifier m = seeded_model(256, 3, {16}, 625);
    const Image x = seeded_image(16, 16, rng);
    const int y = 2;

    PipelineSpec spec;
    spec.order = PipelineOrder::attack_then_compress;
    spec.op = CompressionOperator::jpeg_like(55);
    spec.attack.epsilon = 0.02;

    const PipelineResult result = run_pipeline(spec, m, x, y);
    const Image expected = spec.op->apply(fgsm(m, x, y, 0.02));
    CHECK(result.adversarial.values == expected.values);
}

TEST_CASE("compress_only ignores the attack and returns C(x)") {
    RandomSource rng(626);
    const Classifier m = seeded_model(256, 3, {16}, 627);
    const Image x = seeded_image(16, 16, rng);
    PipelineSpec spec;
    spec.order = PipelineOrder::compress_only;
    spec.op = CompressionOperator::patch_svd(8, 3);
    spec.attack.epsilon = 0.5;
    const PipelineResult result = run_pipeline(spec, m, x, 0);
    CHECK(result.adversarial.values == spec.op->apply(x).values);
}

TEST_CASE("pipelines are deterministic end to end") {
    RandomSource rng(628);
    const Classifier m = seeded_model(256, 3, {16}, 629);
    const Image x = seeded_image(16, 16, rng);
    PipelineSpec spec;
    spec.order = PipelineOrder::compress_then_attack;
    spec.op = CompressionOperator::jpeg_like(55);
    spec.attack.kind = AttackConfig::Kind::pgd;
    spec.attack.epsilon = 0.02;
    spec.attack.alpha = 0.005;
    spec.attack.iterations = 10;
    spec.attack.random_start = true;
    spec.attack.seed = 99;
    const PipelineResult a = run_pipeline(spec, m, x, 1);
    const PipelineResult b = run_pipeline(spec, m, x, 1);
    CHECK(a.adversarial.values == b.adversarial.values);
}

TEST_CASE("compressing orders require an operator") {
    const Classifier m = seeded_model(4, 2, {}, 630);
    const Image x(2, 2, 1, 0.5);
    for (PipelineOrder order : {PipelineOrder::compress_then_attack,
                                PipelineOrder::attack_then_compress,
                                PipelineOrder::compress_only}) {
        PipelineSpec spec;
        spec.order = order;
        CHECK_THROWS_AS(run_pipeline(spec, m, x, 0), ConfigError);
    }
}

TEST_CASE("pipeline labels compose operator and attack identifiers") {
    PipelineSpec spec;
    spec.attack.epsilon = 0.02;

    spec.order = PipelineOrder::attack_only;
    CHECK(spec.label() == "fgsm_eps0.02");

    spec.order = PipelineOrder::compress_then_attack;
    spec.op = CompressionOperator::jpeg_like(55);
    CHECK(spec.label() == "jpeg_q55->fgsm_eps0.02");

    spec.order = PipelineOrder::attack_then_compress;
    CHECK(spec.label() == "fgsm_eps0.02->jpeg_q55");

    spec.order = PipelineOrder::compress_only;
    CHECK(spec.label() == "jpeg_q55");
}
