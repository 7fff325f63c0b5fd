#include "dsr/compression.hpp"

#include <algorithm>
#include <cmath>

#include "dsr/errors.hpp"
#include "dsr/numerics.hpp"

namespace dsr {

namespace {

// Standard luminance quantization base table (the one every JPEG encoder
// ships); quality scaling is applied on top of these entries.
constexpr int kLuminanceBase[8][8] = {
    {16, 11, 10, 16, 24, 40, 51, 61},
    {12, 12, 14, 19, 26, 58, 60, 55},
    {14, 13, 16, 24, 40, 57, 69, 56},
    {14, 17, 22, 29, 51, 87, 80, 62},
    {18, 22, 37, 56, 68, 109, 103, 77},
    {24, 35, 55, 64, 81, 104, 113, 92},
    {49, 64, 78, 87, 103, 121, 120, 101},
    {72, 92, 95, 98, 112, 100, 103, 99},
};

void require_single_channel(const Image& x, const char* where) {
    if (x.channels != 1)
        throw ValueError(std::string(where) + ": single-channel images only, got " +
                         std::to_string(x.channels) + " channels");
}

// Edge-replicated padding up to multiples of `block`; no-op when already
// aligned.
Image pad_replicate(const Image& x, int block) {
    const int padded_h = ((x.height + block - 1) / block) * block;
    const int padded_w = ((x.width + block - 1) / block) * block;
    if (padded_h == x.height && padded_w == x.width)
        return x;
    Image out(padded_h, padded_w, 1);
    for (int r = 0; r < padded_h; ++r) {
        const int sr = std::min(r, x.height - 1);
        for (int c = 0; c < padded_w; ++c)
            out.at(r, c) = x.at(sr, std::min(c, x.width - 1));
    }
    return out;
}

Image crop(const Image& padded, int height, int width) {
    if (padded.height == height && padded.width == width)
        return padded;
    Image out(height, width, 1);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            out.at(r, c) = padded.at(r, c);
    return out;
}

// round() rounds halfway cases away from zero, which is exactly the
// coefficient rounding this codec commits to.
double round_half_away(double v) {
    return std::round(v);
}

} // namespace

int jpeg_quantizer_entry(int base, int quality) {
    if (quality < 1 || quality > 100)
        throw ValueError("jpeg quality must be in 1..100, got " + std::to_string(quality));
    // Integer arithmetic keeps floor((base*scale + 50)/100) exact even for the
    // fractional scales 5000/q.
    long long entry;
    if (quality < 50)
        entry = (static_cast<long long>(base) * 5000 + 50LL * quality) / (100LL * quality);
    else
        entry = (static_cast<long long>(base) * (200 - 2 * quality) + 50) / 100;
    return static_cast<int>(std::clamp(entry, 1LL, 255LL));
}

Image jpeg_like_compress(const Image& x, int quality) {
    if (quality < 1 || quality > 100)
        throw ValueError("jpeg quality must be in 1..100, got " + std::to_string(quality));
    require_single_channel(x, "jpeg_like_compress");

    int table[8][8];
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v)
            table[u][v] = jpeg_quantizer_entry(kLuminanceBase[u][v], quality);

    Image padded = pad_replicate(x, kDctBlockSize);
    Image recon(padded.height, padded.width, 1);
    Matrix block(kDctBlockSize, kDctBlockSize);

    for (int br = 0; br < padded.height; br += kDctBlockSize) {
        for (int bc = 0; bc < padded.width; bc += kDctBlockSize) {
            for (int r = 0; r < kDctBlockSize; ++r)
                for (int c = 0; c < kDctBlockSize; ++c)
                    block(r, c) = padded.at(br + r, bc + c) * 255.0 - 128.0;

            Matrix coef = dct2_block(block);
            for (int u = 0; u < kDctBlockSize; ++u) {
                for (int v = 0; v < kDctBlockSize; ++v) {
                    const double q = static_cast<double>(table[u][v]);
                    coef(u, v) = round_half_away(coef(u, v) / q) * q;
                }
            }
            Matrix rec = idct2_block(coef);
            for (int r = 0; r < kDctBlockSize; ++r)
                for (int c = 0; c < kDctBlockSize; ++c)
                    recon.at(br + r, bc + c) = (rec(r, c) + 128.0) / 255.0;
        }
    }

    Image out = crop(recon, x.height, x.width);
    out.clip01();
    return out;
}

PcaBasis pca_fit(const LabeledDataset& dataset, int k) {
    const std::size_t n = dataset.size();
    if (n == 0)
        throw ValueError("pca_fit: empty dataset");
    const std::size_t d = dataset.images.front().values.size();
    for (const Image& img : dataset.images) {
        if (img.values.size() != d)
            throw ValueError("pca_fit: images do not share dimensions");
    }
    if (k < 1 || static_cast<std::size_t>(k) > std::min(d, n))
        throw ValueError("pca_fit: k must be in 1..min(d, n), got " + std::to_string(k));

    PcaBasis basis;
    basis.mean.resize(d);
    std::vector<double> column(n);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < n; ++i)
            column[i] = dataset.images[i].values[j];
        basis.mean[j] = compensated_sum(column) / static_cast<double>(n);
    }

    Matrix centered(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            centered(i, j) = dataset.images[i].values[j] - basis.mean[j];

    SvdResult svd_result = svd(centered);

    basis.components = Matrix(k, d);
    for (int i = 0; i < k; ++i)
        for (std::size_t j = 0; j < d; ++j)
            basis.components(i, j) = svd_result.v(j, i);

    std::vector<double> squared(svd_result.singular_values.size());
    for (std::size_t i = 0; i < squared.size(); ++i)
        squared[i] = svd_result.singular_values[i] * svd_result.singular_values[i];
    const double total = compensated_sum(squared);
    basis.energy.resize(k);
    for (int i = 0; i < k; ++i)
        basis.energy[i] = total > 0.0 ? squared[i] / total : 0.0;
    return basis;
}

Image pca_compress(const PcaBasis& basis, const Image& x) {
    const std::size_t d = basis.dim();
    if (x.values.size() != d)
        throw DimensionError("pca_compress: image has " + std::to_string(x.values.size()) +
                             " values, basis expects " + std::to_string(d));
    const std::size_t k = basis.count();

    std::vector<double> centered(d);
    for (std::size_t j = 0; j < d; ++j)
        centered[j] = x.values[j] - basis.mean[j];

    std::vector<double> coeff(k);
    for (std::size_t i = 0; i < k; ++i)
        coeff[i] = dot({basis.components.data().data() + i * d, d}, centered);

    Image out = x;
    for (std::size_t j = 0; j < d; ++j) {
        double acc = basis.mean[j];
        for (std::size_t i = 0; i < k; ++i)
            acc += coeff[i] * basis.components(i, j);
        out.values[j] = acc;
    }
    out.clip01();
    return out;
}

Image patch_svd_compress(const Image& x, int patch, int rank) {
    if (patch < 1)
        throw ValueError("patch_svd_compress: patch size must be >= 1");
    if (rank < 1 || rank > patch)
        throw ValueError("patch_svd_compress: rank must be in 1..patch");
    require_single_channel(x, "patch_svd_compress");

    Image padded = pad_replicate(x, patch);
    Image recon(padded.height, padded.width, 1);
    Matrix block(patch, patch);

    for (int br = 0; br < padded.height; br += patch) {
        for (int bc = 0; bc < padded.width; bc += patch) {
            for (int r = 0; r < patch; ++r)
                for (int c = 0; c < patch; ++c)
                    block(r, c) = padded.at(br + r, bc + c);

            SvdResult f = svd(block);
            // Truncated reconstruction sum_{i<rank} s_i u_i v_i^T.
            for (int r = 0; r < patch; ++r) {
                for (int c = 0; c < patch; ++c) {
                    double acc = 0.0;
                    for (int i = 0; i < rank; ++i)
                        acc += f.singular_values[i] * f.u(r, i) * f.v(c, i);
                    recon.at(br + r, bc + c) = acc;
                }
            }
        }
    }

    Image out = crop(recon, x.height, x.width);
    out.clip01();
    return out;
}

CompressionOperator CompressionOperator::identity() {
    return CompressionOperator();
}

CompressionOperator CompressionOperator::jpeg_like(int quality) {
    if (quality < 1 || quality > 100)
        throw ValueError("jpeg quality must be in 1..100, got " + std::to_string(quality));
    CompressionOperator op;
    op.kind_ = Kind::jpeg_like;
    op.quality_ = quality;
    return op;
}

CompressionOperator CompressionOperator::pca(PcaBasis basis) {
    if (basis.count() == 0 || basis.dim() == 0)
        throw ValueError("pca operator needs a fitted, nonempty basis");
    if (basis.count() > basis.dim())
        throw ValueError("pca operator: more components than dimensions");
    CompressionOperator op;
    op.kind_ = Kind::pca;
    op.basis_ = std::move(basis);
    return op;
}

CompressionOperator CompressionOperator::patch_svd(int patch, int rank) {
    if (patch < 1)
        throw ValueError("patch_svd operator: patch size must be >= 1");
    if (rank < 1 || rank > patch)
        throw ValueError("patch_svd operator: rank must be in 1..patch");
    CompressionOperator op;
    op.kind_ = Kind::patch_svd;
    op.patch_ = patch;
    op.rank_ = rank;
    return op;
}

Image CompressionOperator::apply(const Image& x) const {
    switch (kind_) {
    case Kind::identity:
        return x;
    case Kind::jpeg_like:
        return jpeg_like_compress(x, quality_);
    case Kind::pca:
        return pca_compress(basis_, x);
    case Kind::patch_svd:
        return patch_svd_compress(x, patch_, rank_);
    }
    throw StateError("CompressionOperator: unknown kind");
}

std::string CompressionOperator::label() const {
    switch (kind_) {
    case Kind::identity:
        return "identity";
    case Kind::jpeg_like:
        return "jpeg_q" + std::to_string(quality_);
    case Kind::pca:
        return "pca_k" + std::to_string(basis_.count());
    case Kind::patch_svd:
        return "patchsvd_p" + std::to_string(patch_) + "_r" + std::to_string(rank_);
    }
    throw StateError("CompressionOperator: unknown kind");
}

} // namespace dsr
