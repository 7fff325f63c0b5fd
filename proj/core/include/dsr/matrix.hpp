#ifndef DSR_MATRIX_HPP
#define DSR_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "dsr/errors.hpp"

namespace dsr {

/// Dense row-major matrix of 64-bit floats. Carrier for DCT blocks,
/// SVD factors, PCA bases and MLP weights.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (rows == 0 || cols == 0) {
            throw DimensionError("Matrix: rows and cols must be >= 1");
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    /// Flat row-major access, index in [0, size()).
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    /// this * other, shapes must chain.
    Matrix multiply(const Matrix& other) const {
        if (cols_ != other.rows_) {
            throw DimensionError("Matrix::multiply: inner dimensions differ");
        }
        Matrix out(rows_, other.cols_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const double a = (*this)(r, k);
                if (a == 0.0) continue;
                for (std::size_t c = 0; c < other.cols_; ++c) {
                    out(r, c) += a * other(k, c);
                }
            }
        }
        return out;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

} // namespace dsr

#endif // DSR_MATRIX_HPP
