#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "dsr/config.hpp"
#include "dsr/errors.hpp"
#include "dsr/experiments.hpp"
#include "dsr/geometry.hpp"
#include "dsr/io.hpp"
#include "dsr/random.hpp"

using namespace dsr;

namespace {

namespace fs = std::filesystem;

std::string tests_dir() { return DSR_TESTS_DIR; }

struct TempDir {
    fs::path path;

    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("dsr_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<unsigned char> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::string& path) {
    const std::vector<unsigned char> bytes = read_bytes(path);
    return {bytes.begin(), bytes.end()};
}

bool datasets_equal(const LabeledDataset& a, const LabeledDataset& b) {
    if (a.height != b.height || a.width != b.width || a.channels != b.channels ||
        a.num_classes != b.num_classes || a.split != b.split || a.size() != b.size() ||
        a.labels != b.labels)
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.images[i].values != b.images[i].values)
            return false;
    return true;
}

const char* kTinyConfig = R"(# reduced configuration used by the unit tests
dataset.size = 8
dataset.classes = 2
dataset.per_class = 10
train.epochs = 5
train.hidden = 16
attack.fgsm.eps = 0        # degenerate budget: these rows must match "clean"
pca.components = 5
pca.composed_components = 8
sweep.qualities = 0, 50
sweep.seeds = 1
sweep.resolution = 9
ablation.eps = 0.02, 0.04
ablation.pgd.iters = 3
seed = 7
)";

struct TinyRun {
    ExperimentConfig cfg;
    DatasetBundle bundle;
    Classifier model;
};

const TinyRun& tiny_run() {
    static const TinyRun run = [] {
        TinyRun r;
        r.cfg = parse_config_text(kTinyConfig);
        r.bundle = generate_dataset(r.cfg.dataset, dataset_seed(r.cfg));
        TrainConfig tc = r.cfg.train_config();
        tc.seed = training_seed(r.cfg);
        r.model = train(r.bundle.train, tc).model;
        return r;
    }();
    return run;
}

int run_tool(const std::string& args) {
    const std::string command = std::string(DSR_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

} // namespace

// ---------------------------------------------------------------------------
// Dataset generation
// ---------------------------------------------------------------------------

TEST_CASE("generate_dataset is bit-deterministic for equal seeds") {
    DatasetSpec spec;
    spec.size = 8;
    spec.classes = 3;
    spec.per_class = 5;
    const DatasetBundle a = generate_dataset(spec, 31);
    const DatasetBundle b = generate_dataset(spec, 31);
    CHECK(datasets_equal(a.train, b.train));
    CHECK(datasets_equal(a.test, b.test));
    const DatasetBundle c = generate_dataset(spec, 32);
    CHECK_FALSE(datasets_equal(a.train, c.train));
}

TEST_CASE("zero noise degenerates to one template per class") {
    DatasetSpec spec;
    spec.size = 8;
    spec.classes = 2;
    spec.per_class = 5;
    spec.noise_sigma = 0.0;
    const DatasetBundle bundle = generate_dataset(spec, 11);

    std::vector<const Image*> first_of_class(2, nullptr);
    for (const LabeledDataset* ds : {&bundle.train, &bundle.test}) {
        for (std::size_t i = 0; i < ds->size(); ++i) {
            const int y = ds->labels[i];
            if (first_of_class[y] == nullptr)
                first_of_class[y] = &ds->images[i];
            else
                CHECK(ds->images[i].values == first_of_class[y]->values);
        }
    }
    REQUIRE(first_of_class[0] != nullptr);
    REQUIRE(first_of_class[1] != nullptr);
    CHECK(first_of_class[0]->values != first_of_class[1]->values);
}

TEST_CASE("the split is 80/20 by count") {
    DatasetSpec spec;
    spec.size = 8;
    spec.classes = 2;
    spec.per_class = 10;
    const DatasetBundle bundle = generate_dataset(spec, 12);
    CHECK(bundle.train.size() == 16);
    CHECK(bundle.test.size() == 4);
    CHECK(bundle.train.split == LabeledDataset::Split::train);
    CHECK(bundle.test.split == LabeledDataset::Split::test);
    CHECK(bundle.train.num_classes == 2);
}

TEST_CASE("generate_dataset rejects out-of-range specs") {
    DatasetSpec spec;
    spec.classes = 1;
    CHECK_THROWS_AS(generate_dataset(spec, 1), ValueError);
    spec.classes = 4;
    spec.size = 4;
    CHECK_THROWS_AS(generate_dataset(spec, 1), ValueError);
    spec.size = 16;
    spec.per_class = 2;
    CHECK_THROWS_AS(generate_dataset(spec, 1), ValueError);
    spec.per_class = 10;
    spec.noise_sigma = -0.1;
    CHECK_THROWS_AS(generate_dataset(spec, 1), ValueError);
}

TEST_CASE("derived seeds differ per purpose and follow the master seed") {
    ExperimentConfig a;
    a.master_seed = 42;
    ExperimentConfig b;
    b.master_seed = 43;
    CHECK(dataset_seed(a) != training_seed(a));
    CHECK(dataset_seed(a) != dataset_seed(b));
    CHECK(dataset_seed(a) == dataset_seed(a));
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

TEST_CASE("an empty config yields the documented defaults") {
    const ExperimentConfig cfg = parse_config_text("");
    CHECK(cfg.dataset.size == 16);
    CHECK(cfg.dataset.classes == 4);
    CHECK(cfg.dataset.per_class == 500);
    CHECK(cfg.dataset.noise_sigma == doctest::Approx(0.08));
    CHECK(cfg.train_epochs == 30);
    CHECK(cfg.train_batch_size == 16);
    CHECK(cfg.train_learning_rate == doctest::Approx(0.05));
    CHECK(cfg.train_hidden == std::vector<int>{64, 64});
    CHECK(cfg.fgsm_eps == doctest::Approx(0.01));
    CHECK(cfg.pgd_eps == doctest::Approx(2.0 / 255.0));
    CHECK(cfg.pgd_alpha == doctest::Approx(1.0 / 255.0));
    CHECK(cfg.pgd_iterations == 5);
    CHECK(cfg.pgd_random_start);
    CHECK(cfg.composed_eps == doctest::Approx(0.02));
    CHECK(cfg.composed_pgd_iterations == 10);
    CHECK(cfg.jpeg_quality == 25);
    CHECK(cfg.jpeg_composed_quality == 55);
    CHECK(cfg.pca_components == 22);
    CHECK(cfg.pca_composed_components == 50);
    CHECK(cfg.patch_size == 8);
    CHECK(cfg.patch_rank == 3);
    CHECK(cfg.sweep.qualities == std::vector<int>{95, 75, 50, 30, 10});
    CHECK(cfg.sweep.seeds == 50);
    CHECK(cfg.sweep.radius == doctest::Approx(0.35));
    CHECK(cfg.sweep.resolution == 61);
    CHECK(cfg.ablation.epsilons == std::vector<double>{0.02, 0.04, 0.06, 0.08});
    CHECK(cfg.ablation.pgd_iterations == 10);
    CHECK(cfg.master_seed == 42);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("dotted keys, lists and comments parse") {
    const ExperimentConfig cfg = parse_config_text(
        "# full-line comment\n"
        "\n"
        "dataset.size = 24\n"
        "sweep.qualities = 95, 50, 10   # trailing comment\n"
        "train.hidden = 32, 16\n"
        "attack.pgd.random_start = false\n"
        "seed = 99\n"
        "out = results\n");
    CHECK(cfg.dataset.size == 24);
    CHECK(cfg.sweep.qualities == std::vector<int>{95, 50, 10});
    CHECK(cfg.train_hidden == std::vector<int>{32, 16});
    CHECK_FALSE(cfg.pgd_random_start);
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.out_dir == "results");
}

TEST_CASE("malformed configs are rejected with ConfigError") {
    CHECK_THROWS_AS(parse_config_text("nonsense.key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.size = 16\ndataset.size = 24\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.size\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.size = twelve\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.size =\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.classes = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.noise_sigma = -0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("sweep.resolution = 60\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("sweep.qualities = 95,,10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("jpeg.quality = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("attack.pgd.random_start = maybe\n"), ConfigError);
}

TEST_CASE("cross-field consistency is enforced after parsing") {
    CHECK_THROWS_AS(parse_config_text("patchsvd.patch = 4\npatchsvd.rank = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.size = 8\npca.components = 65\n"), ConfigError);
}

TEST_CASE("load_config_file reports unreadable paths") {
    CHECK_THROWS_AS(load_config_file("/nonexistent/dir/config.cfg"), IoError);
    TempDir tmp;
    std::ofstream(tmp.file("ok.cfg")) << "dataset.size = 8\n";
    CHECK(load_config_file(tmp.file("ok.cfg")).dataset.size == 8);
}

// ---------------------------------------------------------------------------
// CSV and number formatting
// ---------------------------------------------------------------------------

TEST_CASE("format_g6 uses six significant digits") {
    CHECK(format_g6(0.02) == "0.02");
    CHECK(format_g6(100.0) == "100");
    CHECK(format_g6(2.0 / 255.0) == "0.00784314");
    CHECK(format_g6(1.0 / 3.0) == "0.333333");
    CHECK(format_g6(0.0) == "0");
}

TEST_CASE("formatted numbers re-parse within six-digit precision") {
    RandomSource rng(901);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.uniform(-100.0, 100.0);
        const double back = std::stod(format_g6(v));
        CHECK(std::abs(back - v) <= 1e-5 * std::abs(v) + 1e-12);
    }
}

TEST_CASE("emit_csv writes LF-only bytes") {
    TempDir tmp;
    const std::string path = tmp.file("table.csv");
    emit_csv(path, {"label", "value"}, {{"a", format_g6(0.5)}, {"b", format_g6(1.25)}});
    const std::string text = read_text(path);
    CHECK(text == "label,value\na,0.5\nb,1.25\n");
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("emit_csv validates its arguments") {
    TempDir tmp;
    CHECK_THROWS_AS(emit_csv(tmp.file("x.csv"), {"a"}, {}), ValueError);
    CHECK_THROWS_AS(emit_csv(tmp.file("x.csv"), {"a", "b"}, {{"only one"}}), ValueError);
    CHECK_THROWS_AS(emit_csv("/nonexistent/dir/x.csv", {"a"}, {{"1"}}), IoError);
}

// ---------------------------------------------------------------------------
// Heatmaps
// ---------------------------------------------------------------------------

TEST_CASE("a single-cell grid renders to known bytes") {
    PlaneGrid grid;
    grid.spec.center = Image(2, 2, 1, 0.5);
    grid.spec.resolution = 1;
    grid.labels = {3};
    grid.margins = {0.5};

    TempDir tmp;
    emit_heatmap(grid, tmp.file("cell"));

    const std::vector<unsigned char> ppm = read_bytes(tmp.file("cell.ppm"));
    const std::vector<unsigned char> expected_ppm = {'P', '6', '\n', '1', ' ', '1', '\n',
                                                     '2', '5', '5', '\n', 0, 130, 200};
    CHECK(ppm == expected_ppm);

    const std::vector<unsigned char> pgm = read_bytes(tmp.file("cell.pgm"));
    const std::vector<unsigned char> expected_pgm = {'P', '5', '\n', '1', ' ', '1', '\n',
                                                     '2', '5', '5', '\n', 255};
    CHECK(pgm == expected_pgm); // flat margin field renders fully bright

    CHECK(read_text(tmp.file("cell_range.csv")) == "min,max\n0.5,0.5\n");
}

TEST_CASE("the 2x2 reference grid matches the checked-in golden bytes") {
    PlaneGrid grid;
    grid.spec.center = Image(2, 2, 1, 0.5);
    grid.spec.resolution = 2;
    grid.labels = {0, 1, -1, 12}; // negative and >= 10 exercise the palette wrap
    grid.margins = {0.5, 0.2, -0.3, 0.1};

    TempDir tmp;
    emit_heatmap(grid, tmp.file("ref"));
    for (const char* suffix : {".ppm", ".pgm", "_range.csv"}) {
        const auto produced = read_bytes(tmp.file(std::string("ref") + suffix));
        const auto golden = read_bytes(tests_dir() + "/golden/heatmap_2x2" + suffix);
        CHECK(produced == golden);
    }
}

TEST_CASE("emit_heatmap rejects an unpopulated grid") {
    PlaneGrid grid;
    grid.spec.resolution = 2;
    grid.labels = {0, 0, 0, 0};
    grid.margins = {0.1}; // wrong size
    TempDir tmp;
    CHECK_THROWS_AS(emit_heatmap(grid, tmp.file("bad")), ValueError);
}

TEST_CASE("the palette has ten distinct opaque colors") {
    const auto& palette = heatmap_palette();
    for (std::size_t i = 0; i < palette.size(); ++i)
        for (std::size_t j = i + 1; j < palette.size(); ++j)
            CHECK(palette[i] != palette[j]);
}

// ---------------------------------------------------------------------------
// Dataset container files
// ---------------------------------------------------------------------------

TEST_CASE("dataset files round-trip bit-exactly") {
    DatasetSpec spec;
    spec.size = 8;
    spec.classes = 2;
    spec.per_class = 5;
    const DatasetBundle bundle = generate_dataset(spec, 55);

    TempDir tmp;
    save_dataset_file(bundle.test, tmp.file("t.ds"));
    const LabeledDataset back = load_dataset_file(tmp.file("t.ds"));
    CHECK(datasets_equal(bundle.test, back));
}

TEST_CASE("dataset files with a bad magic are rejected") {
    DatasetSpec spec;
    spec.size = 8;
    spec.classes = 2;
    spec.per_class = 5;
    const DatasetBundle bundle = generate_dataset(spec, 56);

    TempDir tmp;
    save_dataset_file(bundle.test, tmp.file("t.ds"));
    std::vector<unsigned char> bytes = read_bytes(tmp.file("t.ds"));
    bytes[0] = 'X';
    std::ofstream(tmp.file("bad.ds"), std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_AS(load_dataset_file(tmp.file("bad.ds")), FormatError);
}

TEST_CASE("truncated and padded dataset files are rejected as corrupt") {
    DatasetSpec spec;
    spec.size = 8;
    spec.classes = 2;
    spec.per_class = 5;
    const DatasetBundle bundle = generate_dataset(spec, 57);

    TempDir tmp;
    save_dataset_file(bundle.test, tmp.file("t.ds"));
    std::vector<unsigned char> bytes = read_bytes(tmp.file("t.ds"));

    std::ofstream(tmp.file("short.ds"), std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size() - 1));
    CHECK_THROWS_AS(load_dataset_file(tmp.file("short.ds")), CorruptionError);

    bytes.push_back(0);
    std::ofstream(tmp.file("long.ds"), std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_AS(load_dataset_file(tmp.file("long.ds")), CorruptionError);
}

// ---------------------------------------------------------------------------
// Experiment drivers on the tiny configuration
// ---------------------------------------------------------------------------

TEST_CASE("the attack table reports clean PSNR of exactly 100 dB") {
    const TinyRun& t = tiny_run();
    const std::vector<ResultRow> rows =
        run_attack_table(t.cfg, t.model, t.bundle.train, t.bundle.test);

    REQUIRE(rows.size() == 14);
    CHECK(rows[0].label == "clean");
    CHECK(rows[0].mean_psnr_db == 100.0);
    CHECK(rows[0].examples == static_cast<int>(t.bundle.test.size()));

    // With a zero FGSM budget the attack returns its input bit-identically,
    // so those rows must coincide with the clean row.
    CHECK(rows[1].label == "fgsm_eps0");
    CHECK(rows[1].accuracy_percent == rows[0].accuracy_percent);
    CHECK(rows[1].mean_psnr_db == 100.0);

    for (const ResultRow& row : rows) {
        CHECK(row.accuracy_percent >= 0.0);
        CHECK(row.accuracy_percent <= 100.0);
        CHECK(row.mean_psnr_db > 0.0);
        CHECK(row.examples == rows[0].examples);
    }
}

TEST_CASE("the attack table is deterministic across reruns") {
    const TinyRun& t = tiny_run();
    const auto a = run_attack_table(t.cfg, t.model, t.bundle.train, t.bundle.test);
    const auto b = run_attack_table(t.cfg, t.model, t.bundle.train, t.bundle.test);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].accuracy_percent == b[i].accuracy_percent);
        CHECK(a[i].mean_psnr_db == b[i].mean_psnr_db);
    }
}

TEST_CASE("the quality sweep emits one row per quality and metric") {
    const TinyRun& t = tiny_run();
    const std::vector<SweepRow> rows = run_quality_sweep(t.cfg, t.model, t.bundle.test);
    REQUIRE(rows.size() == 8); // 2 qualities x 4 metrics

    const std::vector<std::string> metrics = {"area_fraction", "mean_margin",
                                              "boundary_intrusion", "boundary_density"};
    for (std::size_t q = 0; q < 2; ++q) {
        for (std::size_t m = 0; m < 4; ++m) {
            const SweepRow& row = rows[q * 4 + m];
            CHECK(row.quality == (q == 0 ? 0 : 50));
            CHECK(row.metric == metrics[m]);
            CHECK(row.stddev == 0.0); // a single seed has no spread
        }
    }
    CHECK(rows[0].mean >= 0.0); // area fraction
    CHECK(rows[0].mean <= 1.0);
    CHECK(rows[2].mean >= 0.0); // boundary intrusion
    CHECK(rows[2].mean <= 1.0);
}

TEST_CASE("a zero attack budget collapses the order experiment") {
    const TinyRun& t = tiny_run();
    ExperimentConfig cfg = t.cfg;
    cfg.composed_eps = 0.0;
    const std::vector<ResultRow> rows = run_order_experiment(cfg, t.model, t.bundle.test);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].label == "clean");
    CHECK(rows[1].label == "jpeg_q55");
    CHECK(rows[2].label == "jpeg_q55->fgsm_eps0");
    CHECK(rows[3].label == "fgsm_eps0->jpeg_q55");
    // Both orders degenerate to compression alone.
    CHECK(rows[2].accuracy_percent == rows[1].accuracy_percent);
    CHECK(rows[3].accuracy_percent == rows[1].accuracy_percent);
    CHECK(rows[2].mean_psnr_db == rows[1].mean_psnr_db);
    CHECK(rows[3].mean_psnr_db == rows[1].mean_psnr_db);
}

TEST_CASE("the epsilon ablation produces the full pipeline-by-budget grid") {
    const TinyRun& t = tiny_run();
    const AblationResult result =
        run_epsilon_ablation(t.cfg, t.model, t.bundle.train, t.bundle.test);
    CHECK(result.epsilons == std::vector<double>{0.02, 0.04});
    REQUIRE(result.labels.size() == 8);
    CHECK(result.labels[0] == "fgsm");
    CHECK(result.labels[1] == "jpeg_q55->fgsm");
    CHECK(result.labels[2] == "pca_k8->fgsm");
    CHECK(result.labels[3] == "patchsvd_p8_r3->fgsm");
    CHECK(result.labels[4] == "pgd");
    REQUIRE(result.accuracy.size() == 8);
    for (const auto& row : result.accuracy) {
        REQUIRE(row.size() == 2);
        for (double acc : row) {
            CHECK(acc >= 0.0);
            CHECK(acc <= 100.0);
        }
    }

    const AblationResult again =
        run_epsilon_ablation(t.cfg, t.model, t.bundle.train, t.bundle.test);
    CHECK(again.accuracy == result.accuracy);
}

TEST_CASE("CSV emitters lay out the experiment tables") {
    const TinyRun& t = tiny_run();
    TempDir tmp;

    const auto rows = run_order_experiment(t.cfg, t.model, t.bundle.test);
    emit_result_rows_csv(rows, tmp.file("order.csv"));
    const std::string order_text = read_text(tmp.file("order.csv"));
    CHECK(order_text.rfind("pipeline,accuracy_percent,mean_psnr_db,examples\nclean,", 0) == 0);

    const auto sweep = run_quality_sweep(t.cfg, t.model, t.bundle.test);
    emit_sweep_csv(sweep, tmp.file("sweep.csv"));
    CHECK(read_text(tmp.file("sweep.csv")).rfind("quality,metric,mean,std\n", 0) == 0);

    const auto ablation = run_epsilon_ablation(t.cfg, t.model, t.bundle.train, t.bundle.test);
    emit_ablation_csv(ablation, tmp.file("ablation.csv"));
    CHECK(read_text(tmp.file("ablation.csv")).rfind("pipeline,eps_0.02,eps_0.04\nfgsm,", 0) == 0);
}

// ---------------------------------------------------------------------------
// Command-line tool
// ---------------------------------------------------------------------------

TEST_CASE("the tool exits 0 on --help") {
    CHECK(run_tool("--help") == 0);
    CHECK(run_tool("gen-data --help") == 0);
}

TEST_CASE("the tool exits 2 on bad invocations") {
    CHECK(run_tool("gen-data --config /nonexistent/config.cfg") == 2);
    CHECK(run_tool("no-such-subcommand") == 2);
}

TEST_CASE("the tool exits 3 on missing run state") {
    TempDir tmp;
    CHECK(run_tool("attack-table --out " + tmp.path.string()) == 3);
    CHECK(run_tool("train --out " + tmp.path.string()) == 3);
}

TEST_CASE("gen-data then train produce loadable artifacts") {
    TempDir tmp;
    std::ofstream(tmp.file("tiny.cfg")) << kTinyConfig;
    const std::string common = " --config " + tmp.file("tiny.cfg") + " --out " + tmp.path.string();
    REQUIRE(run_tool("gen-data" + common) == 0);
    CHECK(load_dataset_file(tmp.file("train.ds")).size() == 16);
    CHECK(load_dataset_file(tmp.file("test.ds")).size() == 4);
    REQUIRE(run_tool("train" + common) == 0);
    const Classifier model = load_checkpoint_file(tmp.file("model.ckpt"));
    CHECK(model.input_dim == 64);
    CHECK(model.num_classes == 2);
    CHECK(read_text(tmp.file("train_log.csv")).rfind("epoch,mean_loss\n", 0) == 0);
}
