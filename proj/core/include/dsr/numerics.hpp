#ifndef DSR_NUMERICS_HPP
#define DSR_NUMERICS_HPP

#include <span>
#include <vector>

#include "dsr/image.hpp"
#include "dsr/matrix.hpp"

namespace dsr {

// ---------------------------------------------------------------------------
// Summation and norms
// ---------------------------------------------------------------------------

/// Neumaier-compensated sum; result is traversal-order independent to ~1e-16
/// relative, which keeps serial and parallel reductions in agreement.
double compensated_sum(std::span<const double> values);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);
double frobenius_norm(const Matrix& m);

// ---------------------------------------------------------------------------
// 8x8 orthonormal DCT-II / DCT-III
// ---------------------------------------------------------------------------

inline constexpr std::size_t kDctBlockSize = 8;

/// 2D orthonormal DCT-II of an 8x8 block: coeffs = T * block * T^t, where
/// T[k][n] = c_k * cos((2n+1) k pi / 16), c_0 = sqrt(1/8), c_k = sqrt(2/8).
/// Energy-preserving; a constant block of value v maps to DC = 8v.
Matrix dct2_block(const Matrix& block);

/// Inverse (DCT-III): idct2_block(dct2_block(b)) == b to ~1e-10.
Matrix idct2_block(const Matrix& coeffs);

// ---------------------------------------------------------------------------
// Singular value decomposition
// ---------------------------------------------------------------------------

struct SvdResult {
    Matrix u;                              // m x min(m,n), orthonormal columns
    std::vector<double> singular_values;   // min(m,n), descending, >= 0
    Matrix v;                              // n x min(m,n), orthonormal columns
};

/// Thin SVD via one-sided Jacobi: a = U diag(S) V^t.
///
/// One-sided Jacobi converges unconditionally at these sizes and is simple to
/// make deterministic: fixed sweep order, equal singular values keep their
/// original column order. Rank-deficient inputs get their null U columns
/// completed with coordinate vectors so U^t U = I always holds.
///
/// Throws ValueError for non-finite entries.
SvdResult svd(const Matrix& a);

// ---------------------------------------------------------------------------
// Gram-Schmidt complement
// ---------------------------------------------------------------------------

/// Unit vector orthogonal to unit vector u, obtained by projecting `candidate`
/// off u. Throws ValueError if ||u|| is not 1 within 1e-9, and
/// DegenerateDirectionError if the residual norm is below 1e-12 (caller
/// should redraw the candidate).
std::vector<double> orthogonal_complement(std::span<const double> u,
                                          std::span<const double> candidate);

// ---------------------------------------------------------------------------
// PSNR
// ---------------------------------------------------------------------------

/// Peak signal-to-noise ratio in dB with MAX = 1, capped at 100.0 (the value
/// reported for identical images). Requires matching shapes and values in
/// [0, 1].
double psnr(const Image& reference, const Image& test);

} // namespace dsr

#endif // DSR_NUMERICS_HPP
