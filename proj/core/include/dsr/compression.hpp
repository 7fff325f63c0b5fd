#ifndef DSR_COMPRESSION_HPP
#define DSR_COMPRESSION_HPP

#include <string>
#include <vector>

#include "dsr/classifier.hpp"
#include "dsr/image.hpp"
#include "dsr/matrix.hpp"

namespace dsr {

/// Quality-scaled quantizer table entry for the luminance base table, using
/// the usual integer scaling: scale = 5000/q below 50, else 200 - 2q, and
/// entry = clamp(floor((base*scale + 50)/100), 1, 255). Exposed for tests.
int jpeg_quantizer_entry(int base, int quality);

/// Lossy single-channel codec: 8x8 blocks (edge-replicated padding), values
/// scaled to 0..255 and level-shifted by -128, orthonormal DCT, coefficients
/// divided by the quality-scaled table and rounded half away from zero, then
/// dequantized and inverted. Output is rescaled to [0,1] and cropped to the
/// input size. Throws ValueError for quality outside 1..100 or multi-channel
/// input.
Image jpeg_like_compress(const Image& x, int quality);

/// Orthonormal principal-component basis of a dataset's images.
struct PcaBasis {
    std::vector<double> mean;    // length d
    Matrix components;           // k x d, rows orthonormal
    std::vector<double> energy;  // explained-energy fraction per component

    std::size_t dim() const { return mean.size(); }
    std::size_t count() const { return components.rows(); }
};

/// Fit mean and the top-k right singular vectors of the centered image matrix.
/// Requires 1 <= k <= min(d, dataset size); throws ValueError otherwise or on
/// inconsistent image shapes.
PcaBasis pca_fit(const LabeledDataset& dataset, int k);

/// Project x onto the basis: mean + sum_i <x - mean, c_i> c_i, clipped to
/// [0,1]. Throws DimensionError when x does not match the basis dimension.
Image pca_compress(const PcaBasis& basis, const Image& x);

/// Replace every non-overlapping p x p patch (after edge-replicated padding)
/// with its best rank-r approximation, then clip to [0,1]. Requires p >= 1 and
/// 1 <= r <= p; throws ValueError otherwise or on multi-channel input.
Image patch_svd_compress(const Image& x, int patch, int rank);

/// A configured compression operator C. Immutable once constructed; apply()
/// is pure and deterministic.
class CompressionOperator {
  public:
    enum class Kind { identity, jpeg_like, pca, patch_svd };

    static CompressionOperator identity();
    static CompressionOperator jpeg_like(int quality);
    static CompressionOperator pca(PcaBasis basis);
    static CompressionOperator patch_svd(int patch, int rank);

    Kind kind() const { return kind_; }
    int quality() const { return quality_; }
    int patch() const { return patch_; }
    int rank() const { return rank_; }
    const PcaBasis& basis() const { return basis_; }

    Image apply(const Image& x) const;

    /// Short stable identifier used in result-table labels, e.g. "jpeg_q55".
    std::string label() const;

  private:
    CompressionOperator() = default;

    Kind kind_ = Kind::identity;
    int quality_ = 0;
    int patch_ = 0;
    int rank_ = 0;
    PcaBasis basis_;
};

} // namespace dsr

#endif // DSR_COMPRESSION_HPP
