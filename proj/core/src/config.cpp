#include "dsr/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "dsr/errors.hpp"

namespace dsr {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad(int line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

long long to_int(const std::string& v, int line) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        bad(line, "expected an integer, got '" + v + "'");
    return out;
}

double to_double(const std::string& v, int line) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        bad(line, "expected a number, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& v, int line) {
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    bad(line, "expected true/false, got '" + v + "'");
}

std::uint64_t to_u64(const std::string& v, int line) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        bad(line, "expected an unsigned integer, got '" + v + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& v, int line) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            bad(line, "empty element in list '" + v + "'");
        parts.push_back(item);
    }
    if (parts.empty())
        bad(line, "expected a non-empty list");
    return parts;
}

void check_range_int(long long v, long long lo, long long hi, const std::string& key, int line) {
    if (v < lo || v > hi)
        bad(line, key + " must be in " + std::to_string(lo) + ".." + std::to_string(hi));
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;

    std::stringstream stream(text);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos)
            raw.erase(hash);
        raw = trim(raw);
        if (raw.empty())
            continue;

        const auto eq = raw.find('=');
        if (eq == std::string::npos)
            bad(line, "expected 'key = value'");
        const std::string key = trim(raw.substr(0, eq));
        const std::string value = trim(raw.substr(eq + 1));
        if (key.empty())
            bad(line, "missing key");
        if (value.empty())
            bad(line, "missing value for '" + key + "'");
        if (!seen.insert(key).second)
            bad(line, "duplicate key '" + key + "'");

        if (key == "dataset.size") {
            cfg.dataset.size = static_cast<int>(to_int(value, line));
            check_range_int(cfg.dataset.size, 8, 256, key, line);
        } else if (key == "dataset.classes") {
            cfg.dataset.classes = static_cast<int>(to_int(value, line));
            check_range_int(cfg.dataset.classes, 2, 10, key, line);
        } else if (key == "dataset.per_class") {
            cfg.dataset.per_class = static_cast<int>(to_int(value, line));
            check_range_int(cfg.dataset.per_class, 5, 1000000, key, line);
        } else if (key == "dataset.noise_sigma") {
            cfg.dataset.noise_sigma = to_double(value, line);
            if (cfg.dataset.noise_sigma < 0.0)
                bad(line, "dataset.noise_sigma must be >= 0");
        } else if (key == "train.epochs") {
            cfg.train_epochs = static_cast<int>(to_int(value, line));
            check_range_int(cfg.train_epochs, 0, 100000, key, line);
        } else if (key == "train.batch_size") {
            cfg.train_batch_size = static_cast<int>(to_int(value, line));
            check_range_int(cfg.train_batch_size, 1, 1000000, key, line);
        } else if (key == "train.learning_rate") {
            cfg.train_learning_rate = to_double(value, line);
            if (!(cfg.train_learning_rate > 0.0))
                bad(line, "train.learning_rate must be > 0");
        } else if (key == "train.hidden") {
            cfg.train_hidden.clear();
            for (const std::string& item : split_list(value, line)) {
                const int width = static_cast<int>(to_int(item, line));
                check_range_int(width, 1, 65536, key, line);
                cfg.train_hidden.push_back(width);
            }
        } else if (key == "attack.fgsm.eps") {
            cfg.fgsm_eps = to_double(value, line);
            if (cfg.fgsm_eps < 0.0)
                bad(line, "attack.fgsm.eps must be >= 0");
        } else if (key == "attack.pgd.eps") {
            cfg.pgd_eps = to_double(value, line);
            if (cfg.pgd_eps < 0.0)
                bad(line, "attack.pgd.eps must be >= 0");
        } else if (key == "attack.pgd.alpha") {
            cfg.pgd_alpha = to_double(value, line);
            if (!(cfg.pgd_alpha > 0.0))
                bad(line, "attack.pgd.alpha must be > 0");
        } else if (key == "attack.pgd.iters") {
            cfg.pgd_iterations = static_cast<int>(to_int(value, line));
            check_range_int(cfg.pgd_iterations, 1, 100000, key, line);
        } else if (key == "attack.pgd.random_start") {
            cfg.pgd_random_start = to_bool(value, line);
        } else if (key == "composed.eps") {
            cfg.composed_eps = to_double(value, line);
            if (cfg.composed_eps < 0.0)
                bad(line, "composed.eps must be >= 0");
        } else if (key == "composed.pgd.iters") {
            cfg.composed_pgd_iterations = static_cast<int>(to_int(value, line));
            check_range_int(cfg.composed_pgd_iterations, 1, 100000, key, line);
        } else if (key == "jpeg.quality") {
            cfg.jpeg_quality = static_cast<int>(to_int(value, line));
            check_range_int(cfg.jpeg_quality, 1, 100, key, line);
        } else if (key == "jpeg.composed_quality") {
            cfg.jpeg_composed_quality = static_cast<int>(to_int(value, line));
            check_range_int(cfg.jpeg_composed_quality, 1, 100, key, line);
        } else if (key == "pca.components") {
            cfg.pca_components = static_cast<int>(to_int(value, line));
            check_range_int(cfg.pca_components, 1, 65536, key, line);
        } else if (key == "pca.composed_components") {
            cfg.pca_composed_components = static_cast<int>(to_int(value, line));
            check_range_int(cfg.pca_composed_components, 1, 65536, key, line);
        } else if (key == "patchsvd.patch") {
            cfg.patch_size = static_cast<int>(to_int(value, line));
            check_range_int(cfg.patch_size, 1, 256, key, line);
        } else if (key == "patchsvd.rank") {
            cfg.patch_rank = static_cast<int>(to_int(value, line));
            check_range_int(cfg.patch_rank, 1, 256, key, line);
        } else if (key == "sweep.qualities") {
            cfg.sweep.qualities.clear();
            for (const std::string& item : split_list(value, line)) {
                const int q = static_cast<int>(to_int(item, line));
                check_range_int(q, 0, 100, key, line); // 0 = no compression
                cfg.sweep.qualities.push_back(q);
            }
        } else if (key == "sweep.seeds") {
            cfg.sweep.seeds = static_cast<int>(to_int(value, line));
            check_range_int(cfg.sweep.seeds, 1, 100000, key, line);
        } else if (key == "sweep.radius") {
            cfg.sweep.radius = to_double(value, line);
            if (!(cfg.sweep.radius > 0.0))
                bad(line, "sweep.radius must be > 0");
        } else if (key == "sweep.resolution") {
            cfg.sweep.resolution = static_cast<int>(to_int(value, line));
            check_range_int(cfg.sweep.resolution, 1, 1001, key, line);
            if (cfg.sweep.resolution % 2 == 0)
                bad(line, "sweep.resolution must be odd");
        } else if (key == "ablation.eps") {
            cfg.ablation.epsilons.clear();
            for (const std::string& item : split_list(value, line)) {
                const double eps = to_double(item, line);
                if (eps < 0.0)
                    bad(line, "ablation.eps entries must be >= 0");
                cfg.ablation.epsilons.push_back(eps);
            }
        } else if (key == "ablation.pgd.iters") {
            cfg.ablation.pgd_iterations = static_cast<int>(to_int(value, line));
            check_range_int(cfg.ablation.pgd_iterations, 1, 100000, key, line);
        } else if (key == "seed") {
            cfg.master_seed = to_u64(value, line);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else {
            bad(line, "unknown key '" + key + "'");
        }
    }

    // Cross-field checks that need the whole file parsed.
    const int d = cfg.dataset.size * cfg.dataset.size;
    if (cfg.patch_rank > cfg.patch_size)
        throw ConfigError("config: patchsvd.rank exceeds patchsvd.patch");
    if (cfg.pca_components > d || cfg.pca_composed_components > d)
        throw ConfigError("config: pca components exceed the image dimension");
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

} // namespace dsr
