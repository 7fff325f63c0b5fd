#include "dsr/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dsr/errors.hpp"

namespace dsr {

double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("dot: size mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double frobenius_norm(const Matrix& m) { return l2_norm(m.data()); }

// ---------------------------------------------------------------------------
// DCT
// ---------------------------------------------------------------------------

namespace {

// Orthonormal DCT-II basis, T[k][n] = c_k cos((2n+1) k pi / 16).
const Matrix& dct_basis() {
    static const Matrix basis = [] {
        Matrix t(kDctBlockSize, kDctBlockSize);
        const double n = static_cast<double>(kDctBlockSize);
        for (std::size_t k = 0; k < kDctBlockSize; ++k) {
            const double ck = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
            for (std::size_t j = 0; j < kDctBlockSize; ++j) {
                t(k, j) = ck * std::cos((2.0 * j + 1.0) * k * std::numbers::pi / (2.0 * n));
            }
        }
        return t;
    }();
    return basis;
}

void require_block(const Matrix& m, const char* who) {
    if (m.rows() != kDctBlockSize || m.cols() != kDctBlockSize) {
        throw DimensionError(std::string(who) + ": block must be 8x8");
    }
    for (double v : m.data()) {
        if (!std::isfinite(v)) throw ValueError(std::string(who) + ": non-finite entry");
    }
}

} // namespace

Matrix dct2_block(const Matrix& block) {
    require_block(block, "dct2_block");
    const Matrix& t = dct_basis();
    return t.multiply(block).multiply(t.transposed());
}

Matrix idct2_block(const Matrix& coeffs) {
    require_block(coeffs, "idct2_block");
    const Matrix& t = dct_basis();
    return t.transposed().multiply(coeffs).multiply(t);
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD
// ---------------------------------------------------------------------------

namespace {

// Core routine for m >= n. Rotates column pairs of `work` until all pairs are
// orthogonal, accumulating the rotations into V.
void jacobi_tall(Matrix& work, Matrix& v) {
    const std::size_t m = work.rows();
    const std::size_t n = work.cols();
    constexpr double tol = 1e-14;
    constexpr int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double aii = 0.0, ajj = 0.0, aij = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    const double x = work(r, i);
                    const double y = work(r, j);
                    aii += x * x;
                    ajj += y * y;
                    aij += x * y;
                }
                if (std::abs(aij) <= tol * std::sqrt(aii * ajj) || aij == 0.0) {
                    continue;
                }
                rotated = true;

                const double zeta = (ajj - aii) / (2.0 * aij);
                const double sign = zeta >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                for (std::size_t r = 0; r < m; ++r) {
                    const double x = work(r, i);
                    const double y = work(r, j);
                    work(r, i) = c * x - s * y;
                    work(r, j) = s * x + c * y;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double x = v(r, i);
                    const double y = v(r, j);
                    v(r, i) = c * x - s * y;
                    v(r, j) = s * x + c * y;
                }
            }
        }
        if (!rotated) break;
    }
}

// Deterministic completion for null columns so U keeps orthonormal columns on
// rank-deficient input: project coordinate vectors off the existing columns
// and take the first with a usable residual.
void complete_null_column(Matrix& u, std::size_t col) {
    const std::size_t m = u.rows();
    const std::size_t n = u.cols();
    std::vector<double> cand(m);
    for (std::size_t e = 0; e < m; ++e) {
        std::fill(cand.begin(), cand.end(), 0.0);
        cand[e] = 1.0;
        for (std::size_t c = 0; c < n; ++c) {
            if (c == col) continue;
            double proj = 0.0;
            for (std::size_t r = 0; r < m; ++r) proj += cand[r] * u(r, c);
            for (std::size_t r = 0; r < m; ++r) cand[r] -= proj * u(r, c);
        }
        const double norm = l2_norm(cand);
        if (norm > 1e-6) {
            for (std::size_t r = 0; r < m; ++r) u(r, col) = cand[r] / norm;
            return;
        }
    }
}

SvdResult svd_tall(const Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();

    Matrix work = a;
    Matrix v = Matrix::identity(n);
    jacobi_tall(work, v);

    // Column norms are the singular values; sort descending, stable so equal
    // values keep their original column order.
    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += work(r, j) * work(r, j);
        sigma[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&sigma](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    SvdResult out;
    out.u = Matrix(m, n);
    out.v = Matrix(n, n);
    out.singular_values.resize(n);
    const double scale = *std::max_element(sigma.begin(), sigma.end());
    const double null_floor = (scale > 0.0 ? scale : 1.0) * 1e-300;

    std::vector<std::size_t> null_cols;
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t j = order[jj];
        out.singular_values[jj] = sigma[j];
        for (std::size_t r = 0; r < n; ++r) out.v(r, jj) = v(r, j);
        if (sigma[j] > null_floor) {
            for (std::size_t r = 0; r < m; ++r) out.u(r, jj) = work(r, j) / sigma[j];
        } else {
            out.singular_values[jj] = 0.0;
            null_cols.push_back(jj);
        }
    }
    for (std::size_t jj : null_cols) complete_null_column(out.u, jj);
    return out;
}

} // namespace

SvdResult svd(const Matrix& a) {
    for (double x : a.data()) {
        if (!std::isfinite(x)) throw ValueError("svd: non-finite entry");
    }
    if (a.rows() >= a.cols()) {
        return svd_tall(a);
    }
    // Wide input: decompose the transpose and swap factors.
    SvdResult t = svd_tall(a.transposed());
    SvdResult out;
    out.u = std::move(t.v);
    out.v = std::move(t.u);
    out.singular_values = std::move(t.singular_values);
    return out;
}

// ---------------------------------------------------------------------------
// Gram-Schmidt complement
// ---------------------------------------------------------------------------

std::vector<double> orthogonal_complement(std::span<const double> u,
                                          std::span<const double> candidate) {
    if (u.size() != candidate.size()) {
        throw DimensionError("orthogonal_complement: size mismatch");
    }
    if (std::abs(l2_norm(u) - 1.0) > 1e-9) {
        throw ValueError("orthogonal_complement: u must be a unit vector");
    }
    const double proj = dot(u, candidate);
    std::vector<double> v(candidate.begin(), candidate.end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * u[i];
    const double norm = l2_norm(v);
    if (norm < 1e-12) {
        throw DegenerateDirectionError("orthogonal_complement: candidate parallel to u");
    }
    for (double& x : v) x /= norm;
    return v;
}

// ---------------------------------------------------------------------------
// PSNR
// ---------------------------------------------------------------------------

double psnr(const Image& reference, const Image& test) {
    if (!reference.same_shape(test)) {
        throw DimensionError("psnr: shape mismatch");
    }
    for (double v : reference.values) {
        if (v < 0.0 || v > 1.0) throw ValueError("psnr: reference outside [0,1]");
    }
    for (double v : test.values) {
        if (v < 0.0 || v > 1.0) throw ValueError("psnr: test outside [0,1]");
    }
    double se = 0.0;
    for (std::size_t i = 0; i < reference.values.size(); ++i) {
        const double d = reference.values[i] - test.values[i];
        se += d * d;
    }
    const double mse = se / static_cast<double>(reference.values.size());
    if (mse <= 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

} // namespace dsr
