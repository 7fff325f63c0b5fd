#include "dsr/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "dsr/errors.hpp"
#include "dsr/geometry.hpp"
#include "dsr/io.hpp"
#include "dsr/numerics.hpp"
#include "dsr/random.hpp"

namespace dsr {

namespace {

// Class template: class evidence is split over two spatial-frequency bands
// with very different strengths. The class PAIR (cls / 2) is encoded by
// loud low-frequency cosines; the member within a pair is encoded by a
// quiet pattern of oblique mid-band waves whose sign flips between the two
// members. The quiet cue carries less variance than any direction of the
// generator's texture, so subspace codecs rank texture first and shed the
// cue, while block codecs quantize its band away; either way the codec
// output keeps the pair but blurs the member, which is precisely the
// margin structure the compression experiments probe. Values stay well
// inside [0,1] before noise.
double class_template(int cls, int r, int c, int size) {
    const int group = cls / 2;
    const int member = cls % 2;
    const int fr = 1 + (group % 2);
    const int fc = 1 + (group / 2);
    const double two_pi = 2.0 * std::numbers::pi;
    const double base = std::cos(two_pi * (r + 0.5) / size) *
                        std::cos(two_pi * (c + 0.5) / size);
    const double keyed = std::cos(two_pi * fr * (r + 0.5) / size) *
                         std::cos(two_pi * fc * (c + 0.5) / size);
    const double ripple = std::cos(two_pi * (group + 1) * (r + c + 1) / (2.0 * size));
    // The member cue is split over two bands of oblique plane waves, phase-
    // shifted so they sit between block-transform basis cells and between
    // patch-separable ranks, with orientations flipping per group so each
    // pair owns its own directions. The mid-band pair survives moderate
    // compression; the high-band pair (outside the texture disk) is the
    // first casualty of quantization, so member evidence drains gradually
    // across the quality ladder instead of in one cliff.
    const double ar = group % 2 == 0 ? 6.0 : 3.0;
    const double ac = group % 2 == 0 ? 3.0 : -6.0;
    const double w1 = std::cos(two_pi * (ar * (r + 0.5) + ac * (c + 0.5)) / size + 0.7);
    const double w2 = std::cos(two_pi * (ac * (r + 0.5) - ar * (c + 0.5)) / size + 1.9);
    const double hr = group % 2 == 0 ? 7.0 : 4.0;
    const double hc = group % 2 == 0 ? 4.0 : -7.0;
    const double w3 = std::cos(two_pi * (hr * (r + 0.5) + hc * (c + 0.5)) / size + 0.4);
    const double w4 = std::cos(two_pi * (hc * (r + 0.5) - hr * (c + 0.5)) / size + 2.3);
    const double sign = member == 0 ? 1.0 : -1.0;
    return 0.5 + 0.17 * base + 0.14 * keyed + 0.04 * ripple +
           sign * 0.006 * (w1 + w2) + sign * 0.014 * (w3 + w4);
}

struct PipelineRun {
    PipelineSpec spec;
    RandomSource seeds; // per-example attack seeds derive from this
};

// Evaluate one pipeline over the whole test split.
ResultRow evaluate_pipeline(PipelineRun run, const Classifier& model,
                            const LabeledDataset& test) {
    std::size_t hits = 0;
    std::vector<double> psnrs(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        PipelineSpec spec = run.spec;
        spec.attack.seed = run.seeds.child(i + 1).seed_state();
        const PipelineResult result = run_pipeline(spec, model, test.images[i], test.labels[i]);
        if (predicted_label(forward(model, result.adversarial)) == test.labels[i])
            ++hits;
        psnrs[i] = psnr(result.reference, result.adversarial);
    }
    ResultRow row;
    row.label = run.spec.label();
    row.accuracy_percent = 100.0 * static_cast<double>(hits) / static_cast<double>(test.size());
    row.mean_psnr_db = compensated_sum(psnrs) / static_cast<double>(test.size());
    row.examples = static_cast<int>(test.size());
    return row;
}

ResultRow clean_row(const Classifier& model, const LabeledDataset& test) {
    ResultRow row;
    row.label = "clean";
    row.accuracy_percent = accuracy_percent(model, test);
    row.mean_psnr_db = 100.0;
    row.examples = static_cast<int>(test.size());
    return row;
}

AttackConfig make_fgsm(double eps) {
    AttackConfig a;
    a.kind = AttackConfig::Kind::fgsm;
    a.epsilon = eps;
    return a;
}

AttackConfig make_pgd(double eps, double alpha, int iters, bool random_start) {
    AttackConfig a;
    a.kind = AttackConfig::Kind::pgd;
    a.epsilon = eps;
    a.alpha = alpha;
    a.iterations = iters;
    a.random_start = random_start;
    return a;
}

PipelineSpec attack_only(AttackConfig attack) {
    PipelineSpec s;
    s.order = PipelineOrder::attack_only;
    s.attack = attack;
    return s;
}

PipelineSpec compress_only(CompressionOperator op) {
    PipelineSpec s;
    s.order = PipelineOrder::compress_only;
    s.op = std::move(op);
    return s;
}

PipelineSpec composed(PipelineOrder order, CompressionOperator op, AttackConfig attack) {
    PipelineSpec s;
    s.order = order;
    s.op = std::move(op);
    s.attack = attack;
    return s;
}

} // namespace

std::uint64_t dataset_seed(const ExperimentConfig& cfg) {
    return RandomSource(cfg.master_seed).child(1).seed_state();
}

std::uint64_t training_seed(const ExperimentConfig& cfg) {
    return RandomSource(cfg.master_seed).child(2).seed_state();
}

DatasetBundle generate_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    if (spec.classes < 2 || spec.classes > 10)
        throw ValueError("generate_dataset: class count must be 2..10");
    if (spec.size < 8)
        throw ValueError("generate_dataset: image size must be >= 8");
    if (spec.per_class < 5)
        throw ValueError("generate_dataset: need at least 5 examples per class");
    if (spec.noise_sigma < 0.0)
        throw ValueError("generate_dataset: noise sigma must be >= 0");

    RandomSource base(seed);
    const int total = spec.classes * spec.per_class;

    std::vector<Image> images;
    std::vector<int> labels;
    images.reserve(total);
    labels.reserve(total);
    std::vector<Image> templates;
    templates.reserve(spec.classes);
    for (int cls = 0; cls < spec.classes; ++cls) {
        Image tmpl(spec.size, spec.size, 1);
        for (int r = 0; r < spec.size; ++r)
            for (int c = 0; c < spec.size; ++c)
                tmpl.at(r, c) = class_template(cls, r, c, spec.size);
        templates.push_back(std::move(tmpl));
    }

    // The texture is a band-limited Gaussian field: independent N(0,1)
    // amplitudes on every torus wave inside a low-frequency disk,
    // 1 <= p^2 + q^2 <= (11/64)·size^2 (one cosine and one sine per
    // wave; radius ~6.6 at the default size, just inside the member-cue
    // waves so the texture never overlaps them). Per-wave variance grows
    // linearly with |frequency| and the total is normalized so the
    // per-pixel marginal deviation is exactly noise_sigma; sigma = 0
    // degenerates to the bare template. The tilt toward the top of the
    // band costs block and subspace codecs real reconstruction error, and
    // it keeps dozens of texture directions above the quiet member cue,
    // so a subspace codec ranks texture first and sheds the cue instead of
    // facing a flat white-noise floor it could trivially ignore.
    struct Wave {
        int p;
        int q;
    };
    std::vector<Wave> waves;
    const int rad2 = spec.size * spec.size * 11 / 64;
    for (int p = 0; p * p <= rad2; ++p)
        for (int q = -spec.size / 2 + 1; q <= spec.size / 2 - 1; ++q) {
            if (p == 0 && q <= 0)
                continue;
            if (p * p + q * q >= 1 && p * p + q * q <= rad2)
                waves.push_back({p, q});
        }
    double weight_sum = 0.0;
    for (const Wave& w : waves)
        weight_sum += std::sqrt(static_cast<double>(w.p * w.p + w.q * w.q));
    const double two_pi = 2.0 * std::numbers::pi;
    const std::size_t npix = static_cast<std::size_t>(spec.size) * spec.size;
    std::vector<double> amp(waves.size());
    std::vector<double> cos_table(waves.size() * npix);
    std::vector<double> sin_table(cos_table.size());
    for (std::size_t w = 0; w < waves.size(); ++w) {
        const double freq = std::sqrt(static_cast<double>(waves[w].p * waves[w].p +
                                                          waves[w].q * waves[w].q));
        amp[w] = spec.noise_sigma * std::sqrt(freq / weight_sum);
        for (int r = 0; r < spec.size; ++r)
            for (int c = 0; c < spec.size; ++c) {
                const double phase = two_pi * (waves[w].p * r + waves[w].q * c) / spec.size;
                const std::size_t at = w * npix + static_cast<std::size_t>(r) * spec.size + c;
                cos_table[at] = std::cos(phase);
                sin_table[at] = std::sin(phase);
            }
    }
    for (int g = 0; g < total; ++g) {
        const int cls = g / spec.per_class;
        RandomSource rng = base.child(static_cast<std::uint64_t>(g) + 1);
        Image img = templates[cls];
        for (std::size_t w = 0; w < waves.size(); ++w) {
            const double a = amp[w] * rng.normal();
            const double b = amp[w] * rng.normal();
            const double* ct = cos_table.data() + w * npix;
            const double* st = sin_table.data() + w * npix;
            for (std::size_t i = 0; i < npix; ++i)
                img.values[i] += a * ct[i] + b * st[i];
        }
        img.clip01();
        images.push_back(std::move(img));
        labels.push_back(cls);
    }

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    RandomSource split_rng = base.child(0);
    split_rng.shuffle(order);

    const int n_train = total * 4 / 5;
    DatasetBundle bundle;
    for (LabeledDataset* ds : {&bundle.train, &bundle.test}) {
        ds->height = spec.size;
        ds->width = spec.size;
        ds->channels = 1;
        ds->num_classes = spec.classes;
    }
    bundle.train.split = LabeledDataset::Split::train;
    bundle.test.split = LabeledDataset::Split::test;
    for (int i = 0; i < total; ++i) {
        LabeledDataset& ds = i < n_train ? bundle.train : bundle.test;
        ds.images.push_back(images[order[i]]);
        ds.labels.push_back(labels[order[i]]);
    }
    return bundle;
}

std::vector<ResultRow> run_attack_table(const ExperimentConfig& cfg, const Classifier& model,
                                        const LabeledDataset& train, const LabeledDataset& test) {
    if (test.size() == 0)
        throw StateError("run_attack_table: empty test split");

    const CompressionOperator jpeg_alone = CompressionOperator::jpeg_like(cfg.jpeg_quality);
    const CompressionOperator jpeg_comp = CompressionOperator::jpeg_like(cfg.jpeg_composed_quality);
    const CompressionOperator pca_alone =
        CompressionOperator::pca(pca_fit(train, cfg.pca_components));
    const CompressionOperator pca_comp =
        CompressionOperator::pca(pca_fit(train, cfg.pca_composed_components));
    const CompressionOperator patch = CompressionOperator::patch_svd(cfg.patch_size, cfg.patch_rank);

    const AttackConfig fgsm_alone = make_fgsm(cfg.fgsm_eps);
    const AttackConfig pgd_alone =
        make_pgd(cfg.pgd_eps, cfg.pgd_alpha, cfg.pgd_iterations, cfg.pgd_random_start);
    const AttackConfig fgsm_matched = make_fgsm(cfg.composed_eps);
    const AttackConfig pgd_matched = make_pgd(cfg.composed_eps, cfg.pgd_alpha,
                                              cfg.composed_pgd_iterations, cfg.pgd_random_start);

    std::vector<PipelineSpec> pipelines;
    pipelines.push_back(attack_only(fgsm_alone));
    pipelines.push_back(attack_only(pgd_alone));
    pipelines.push_back(attack_only(fgsm_matched));
    pipelines.push_back(attack_only(pgd_matched));
    pipelines.push_back(compress_only(jpeg_alone));
    pipelines.push_back(compress_only(pca_alone));
    pipelines.push_back(compress_only(patch));
    for (const CompressionOperator* op : {&jpeg_comp, &pca_comp, &patch}) {
        pipelines.push_back(composed(PipelineOrder::compress_then_attack, *op, fgsm_matched));
        pipelines.push_back(composed(PipelineOrder::compress_then_attack, *op, pgd_matched));
    }

    RandomSource master(cfg.master_seed);
    std::vector<ResultRow> rows;
    rows.push_back(clean_row(model, test));
    for (std::size_t r = 0; r < pipelines.size(); ++r)
        rows.push_back(evaluate_pipeline({pipelines[r], master.child(100 + r)}, model, test));
    return rows;
}

std::vector<SweepRow> run_quality_sweep(const ExperimentConfig& cfg, const Classifier& model,
                                        const LabeledDataset& test) {
    if (test.size() == 0)
        throw StateError("run_quality_sweep: empty test split");

    // Plane centers: the first N correctly classified test examples.
    std::vector<std::size_t> centers;
    for (std::size_t i = 0; i < test.size() && centers.size() < static_cast<std::size_t>(cfg.sweep.seeds); ++i) {
        if (predicted_label(forward(model, test.images[i])) == test.labels[i])
            centers.push_back(i);
    }
    if (centers.empty())
        throw StateError("run_quality_sweep: no correctly classified test examples");
    if (centers.size() < static_cast<std::size_t>(cfg.sweep.seeds))
        std::fprintf(stderr,
                     "dsr-sweep: only %zu correctly classified examples available "
                     "(%d requested); reducing\n",
                     centers.size(), cfg.sweep.seeds);

    RandomSource master(cfg.master_seed);
    std::vector<PlaneSpec> planes;
    planes.reserve(centers.size());
    for (std::size_t k = 0; k < centers.size(); ++k) {
        RandomSource plane_rng = master.child(200 + k);
        planes.push_back(build_plane(model, test.images[centers[k]], test.labels[centers[k]],
                                     plane_rng, cfg.sweep.radius, cfg.sweep.resolution));
    }

    const char* metric_names[4] = {"area_fraction", "mean_margin", "boundary_intrusion",
                                   "boundary_density"};
    std::vector<SweepRow> rows;
    std::vector<double> values(centers.size());
    for (int quality : cfg.sweep.qualities) {
        CompressionOperator op = CompressionOperator::identity();
        const bool compressed = quality > 0;
        if (compressed)
            op = CompressionOperator::jpeg_like(quality);
        std::vector<DsrMetrics> per_seed(centers.size());
        for (std::size_t k = 0; k < centers.size(); ++k)
            per_seed[k] = dsr_metrics(evaluate_grid(model, compressed ? &op : nullptr, planes[k]));

        for (int m = 0; m < 4; ++m) {
            for (std::size_t k = 0; k < centers.size(); ++k) {
                const DsrMetrics& d = per_seed[k];
                values[k] = m == 0   ? d.area_fraction
                            : m == 1 ? d.mean_margin
                            : m == 2 ? d.boundary_intrusion
                                     : d.boundary_density;
            }
            const double n = static_cast<double>(values.size());
            const double mean = compensated_sum(values) / n;
            std::vector<double> sq(values.size());
            for (std::size_t k = 0; k < values.size(); ++k)
                sq[k] = (values[k] - mean) * (values[k] - mean);
            rows.push_back({quality, metric_names[m], mean, std::sqrt(compensated_sum(sq) / n)});
        }
    }
    return rows;
}

std::vector<ResultRow> run_order_experiment(const ExperimentConfig& cfg, const Classifier& model,
                                            const LabeledDataset& test) {
    if (test.size() == 0)
        throw StateError("run_order_experiment: empty test split");

    const CompressionOperator jpeg = CompressionOperator::jpeg_like(cfg.jpeg_composed_quality);
    const AttackConfig fgsm_cfg = make_fgsm(cfg.composed_eps);

    RandomSource master(cfg.master_seed);
    std::vector<ResultRow> rows;
    rows.push_back(clean_row(model, test));
    rows.push_back(evaluate_pipeline({compress_only(jpeg), master.child(401)}, model, test));
    rows.push_back(evaluate_pipeline(
        {composed(PipelineOrder::compress_then_attack, jpeg, fgsm_cfg), master.child(402)},
        model, test));
    rows.push_back(evaluate_pipeline(
        {composed(PipelineOrder::attack_then_compress, jpeg, fgsm_cfg), master.child(403)},
        model, test));
    return rows;
}

AblationResult run_epsilon_ablation(const ExperimentConfig& cfg, const Classifier& model,
                                    const LabeledDataset& train, const LabeledDataset& test) {
    if (test.size() == 0)
        throw StateError("run_epsilon_ablation: empty test split");
    if (cfg.ablation.epsilons.empty())
        throw ValueError("run_epsilon_ablation: no epsilons configured");
    if (cfg.ablation.epsilons.size() > 64)
        throw ValueError("run_epsilon_ablation: at most 64 epsilons supported");

    const CompressionOperator jpeg = CompressionOperator::jpeg_like(cfg.jpeg_composed_quality);
    const CompressionOperator pca_op =
        CompressionOperator::pca(pca_fit(train, cfg.pca_composed_components));
    const CompressionOperator patch = CompressionOperator::patch_svd(cfg.patch_size, cfg.patch_rank);
    const std::vector<const CompressionOperator*> ops = {nullptr, &jpeg, &pca_op, &patch};

    AblationResult result;
    result.epsilons = cfg.ablation.epsilons;

    RandomSource master(cfg.master_seed);
    std::size_t kind_index = 0;
    for (AttackConfig::Kind kind : {AttackConfig::Kind::fgsm, AttackConfig::Kind::pgd}) {
        for (const CompressionOperator* op : ops) {
            const char* attack_name = kind == AttackConfig::Kind::fgsm ? "fgsm" : "pgd";
            result.labels.push_back(op == nullptr ? attack_name
                                                  : op->label() + "->" + attack_name);
            std::vector<double> accuracies;
            for (std::size_t c = 0; c < result.epsilons.size(); ++c) {
                const double eps = result.epsilons[c];
                AttackConfig attack =
                    kind == AttackConfig::Kind::fgsm
                        ? make_fgsm(eps)
                        : make_pgd(eps, eps / 4.0, cfg.ablation.pgd_iterations, true);
                PipelineSpec spec =
                    op == nullptr
                        ? attack_only(attack)
                        : composed(PipelineOrder::compress_then_attack, *op, attack);
                // Seeds are keyed by (attack kind, budget) only, NOT by the
                // compression operator, so the pixel-space row and every
                // compression-aware row of one column share per-example
                // random starts. The column comparison is then paired and
                // start-up luck cancels out of the row ordering.
                const ResultRow row = evaluate_pipeline(
                    {spec, master.child(500 + 2 * c + kind_index)}, model, test);
                accuracies.push_back(row.accuracy_percent);
            }
            result.accuracy.push_back(std::move(accuracies));
        }
        ++kind_index;
    }
    return result;
}

void emit_result_rows_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::vector<std::vector<std::string>> cells;
    cells.reserve(rows.size());
    for (const ResultRow& row : rows)
        cells.push_back({row.label, format_g6(row.accuracy_percent),
                         format_g6(row.mean_psnr_db), std::to_string(row.examples)});
    emit_csv(path, {"pipeline", "accuracy_percent", "mean_psnr_db", "examples"}, cells);
}

void emit_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::vector<std::vector<std::string>> cells;
    cells.reserve(rows.size());
    for (const SweepRow& row : rows)
        cells.push_back({std::to_string(row.quality), row.metric, format_g6(row.mean),
                         format_g6(row.stddev)});
    emit_csv(path, {"quality", "metric", "mean", "std"}, cells);
}

void emit_ablation_csv(const AblationResult& result, const std::string& path) {
    std::vector<std::string> header = {"pipeline"};
    for (double eps : result.epsilons)
        header.push_back("eps_" + format_g6(eps));
    std::vector<std::vector<std::string>> cells;
    for (std::size_t r = 0; r < result.labels.size(); ++r) {
        std::vector<std::string> row = {result.labels[r]};
        for (double acc : result.accuracy[r])
            row.push_back(format_g6(acc));
        cells.push_back(std::move(row));
    }
    emit_csv(path, header, cells);
}

} // namespace dsr
