#include "dsr/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "dsr/errors.hpp"

namespace dsr {

namespace {

void write_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char bytes[4];
    for (int i = 0; i < 4; ++i)
        bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

void write_f64_le(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint32_t read_u32_le(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in)
        throw CorruptionError("dataset file: truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return v;
}

double read_f64_le(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in)
        throw CorruptionError("dataset file: truncated");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

std::ofstream open_binary_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    return out;
}

} // namespace

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void emit_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty())
        throw ValueError("emit_csv: no rows to write");
    std::ofstream out = open_binary_out(path);

    auto write_line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0)
                out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    write_line(header);
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw ValueError("emit_csv: row width does not match the header");
        write_line(row);
    }
    if (!out)
        throw IoError("short write: " + path);
}

const std::array<std::array<unsigned char, 3>, 10>& heatmap_palette() {
    static const std::array<std::array<unsigned char, 3>, 10> palette = {{
        {230, 25, 75},   // red
        {60, 180, 75},   // green
        {255, 225, 25},  // yellow
        {0, 130, 200},   // blue
        {245, 130, 48},  // orange
        {145, 30, 180},  // purple
        {70, 240, 240},  // cyan
        {240, 50, 230},  // magenta
        {210, 245, 60},  // lime
        {128, 128, 128}, // gray
    }};
    return palette;
}

void emit_heatmap(const PlaneGrid& grid, const std::string& prefix) {
    const int n = grid.resolution();
    const std::size_t total = static_cast<std::size_t>(n) * n;
    if (total == 0 || grid.labels.size() != total || grid.margins.size() != total)
        throw ValueError("emit_heatmap: grid is empty or not fully populated");

    const auto& palette = heatmap_palette();
    {
        std::ofstream out = open_binary_out(prefix + ".ppm");
        out << "P6\n" << n << ' ' << n << "\n255\n";
        for (std::size_t i = 0; i < total; ++i) {
            const auto& rgb = palette[static_cast<std::size_t>(
                ((grid.labels[i] % 10) + 10) % 10)];
            out.write(reinterpret_cast<const char*>(rgb.data()), 3);
        }
        if (!out)
            throw IoError("short write: " + prefix + ".ppm");
    }

    const auto [mn_it, mx_it] = std::minmax_element(grid.margins.begin(), grid.margins.end());
    const double mn = *mn_it;
    const double mx = *mx_it;
    {
        std::ofstream out = open_binary_out(prefix + ".pgm");
        out << "P5\n" << n << ' ' << n << "\n255\n";
        const double span = mx - mn;
        for (std::size_t i = 0; i < total; ++i) {
            long byte = 255; // a flat margin field renders fully bright
            if (span > 0.0)
                byte = std::lround((grid.margins[i] - mn) / span * 255.0);
            const unsigned char pixel =
                static_cast<unsigned char>(std::clamp(byte, 0L, 255L));
            out.write(reinterpret_cast<const char*>(&pixel), 1);
        }
        if (!out)
            throw IoError("short write: " + prefix + ".pgm");
    }

    emit_csv(prefix + "_range.csv", {"min", "max"}, {{format_g6(mn), format_g6(mx)}});
}

namespace {
constexpr char kDatasetMagic[8] = {'D', 'S', 'R', 'D', 'S', 'E', 'T', '1'};
constexpr std::uint32_t kDatasetVersion = 1;
} // namespace

void save_dataset_file(const LabeledDataset& dataset, const std::string& path) {
    if (dataset.size() == 0 || dataset.images.size() != dataset.labels.size())
        throw ValueError("save_dataset_file: empty or inconsistent dataset");
    std::ofstream out = open_binary_out(path);
    out.write(kDatasetMagic, 8);
    write_u32_le(out, kDatasetVersion);
    write_u32_le(out, static_cast<std::uint32_t>(dataset.height));
    write_u32_le(out, static_cast<std::uint32_t>(dataset.width));
    write_u32_le(out, static_cast<std::uint32_t>(dataset.channels));
    write_u32_le(out, static_cast<std::uint32_t>(dataset.num_classes));
    write_u32_le(out, static_cast<std::uint32_t>(dataset.size()));
    write_u32_le(out, dataset.split == LabeledDataset::Split::train ? 0u : 1u);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (double v : dataset.images[i].values)
            write_f64_le(out, v);
        write_u32_le(out, static_cast<std::uint32_t>(dataset.labels[i]));
    }
    if (!out)
        throw IoError("short write: " + path);
}

LabeledDataset load_dataset_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kDatasetMagic, 8) != 0)
        throw FormatError("dataset file: bad magic");
    const std::uint32_t version = read_u32_le(in);
    if (version != kDatasetVersion)
        throw FormatError("dataset file: unsupported version " + std::to_string(version));

    LabeledDataset ds;
    ds.height = static_cast<int>(read_u32_le(in));
    ds.width = static_cast<int>(read_u32_le(in));
    ds.channels = static_cast<int>(read_u32_le(in));
    ds.num_classes = static_cast<int>(read_u32_le(in));
    const std::uint32_t count = read_u32_le(in);
    const std::uint32_t split = read_u32_le(in);
    if (ds.height < 1 || ds.width < 1 || ds.channels < 1 || ds.num_classes < 2 ||
        count == 0 || split > 1)
        throw CorruptionError("dataset file: implausible header fields");
    ds.split = split == 0 ? LabeledDataset::Split::train : LabeledDataset::Split::test;

    const std::size_t d = static_cast<std::size_t>(ds.height) * ds.width * ds.channels;
    ds.images.reserve(count);
    ds.labels.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Image img(ds.height, ds.width, ds.channels);
        for (std::size_t j = 0; j < d; ++j) {
            const double v = read_f64_le(in);
            if (!(v >= 0.0 && v <= 1.0))
                throw CorruptionError("dataset file: pixel value outside [0,1]");
            img.values[j] = v;
        }
        const std::uint32_t label = read_u32_le(in);
        if (label >= static_cast<std::uint32_t>(ds.num_classes))
            throw CorruptionError("dataset file: label out of range");
        ds.images.push_back(std::move(img));
        ds.labels.push_back(static_cast<int>(label));
    }
    // Must now be exactly at end of file.
    char extra;
    in.read(&extra, 1);
    if (!in.eof())
        throw CorruptionError("dataset file: trailing bytes after records");
    return ds;
}

} // namespace dsr
