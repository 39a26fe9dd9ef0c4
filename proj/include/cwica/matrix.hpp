#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "cwica/error.hpp"

namespace cwica {

/// Dense row-major sample matrix: rows are observations, columns are
/// features/signals. The universal data carrier of the library.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (rows == 0 || cols == 0)
            throw dimension_error("Matrix: rows and cols must be >= 1");
    }

    /// Row-wise construction, mostly for tests and small fixtures.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    std::vector<double> column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> values);

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    /// Rows selected by index, in the given order.
    Matrix take_rows(std::span<const std::size_t> indices) const;

    /// First `count` columns.
    Matrix take_cols(std::size_t count) const;

    Matrix transposed() const;

    bool all_finite() const;

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Plain matrix product a(n×k) · b(k×m).
Matrix matmul(const Matrix& a, const Matrix& b);

/// a + b elementwise.
Matrix add(const Matrix& a, const Matrix& b);

/// a - b elementwise.
Matrix subtract(const Matrix& a, const Matrix& b);

/// Elementwise map.
Matrix map(const Matrix& a, double (*fn)(double));

/// FNV-1a 64-bit hash of the raw little-endian bytes, as a 16-char hex
/// string. Used to pin datasets and mixing matrices in golden files.
std::string matrix_checksum(const Matrix& m);

} // namespace cwica
