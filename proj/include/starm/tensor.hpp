// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starm/memory.hpp"

#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace starm {

using Dims = std::vector<std::size_t>;

/// Product of all extents (1 for an empty list).
std::size_t element_count(std::span<const std::size_t> dims);

/// Non-owning column-major view of a matrix with leading dimension `ld`.
template <class T>
class BasicMatrixView {
public:
    BasicMatrixView() = default;
    BasicMatrixView(T* data, std::size_t rows, std::size_t cols, std::size_t ld)
        : data_(data), rows_(rows), cols_(cols), ld_(ld) {}
    BasicMatrixView(T* data, std::size_t rows, std::size_t cols)
        : BasicMatrixView(data, rows, cols, rows) {}

    template <class U, class = std::enable_if_t<std::is_same_v<const U, T> && !std::is_same_v<U, T>>>
    BasicMatrixView(const BasicMatrixView<U>& other)
        : data_(other.data()), rows_(other.rows()), cols_(other.cols()), ld_(other.ld()) {}

    T& operator()(std::size_t i, std::size_t j) const { return data_[i + j * ld_]; }

    T* data() const noexcept { return data_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t ld() const noexcept { return ld_; }

private:
    T* data_ = nullptr;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t ld_ = 0;
};

using MatrixView = BasicMatrixView<double>;
using ConstMatrixView = BasicMatrixView<const double>;

/// Owning column-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, Buffer data);

    static Matrix identity(std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    const Buffer& values() const noexcept { return data_; }

    MatrixView view() noexcept { return {data_.data(), rows_, cols_}; }
    ConstMatrixView view() const noexcept { return {data_.data(), rows_, cols_}; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Buffer data_;
};

/// Position of a frontal slice: the indices of modes 3..d and their
/// column-major flattening.
struct SliceIndex {
    std::vector<std::size_t> trailing;
    std::size_t flat = 0;

    /// Throws if a trailing index is out of range.
    static SliceIndex from_trailing(std::span<const std::size_t> dims, std::vector<std::size_t> trailing);
    /// Throws if flat >= number of slices.
    static SliceIndex from_flat(std::span<const std::size_t> dims, std::size_t flat);
};

/// Dense d-way tensor of doubles in column-major order.
class DenseTensor {
public:
    DenseTensor() = default;
    /// Zero-filled tensor. Extents must be positive.
    explicit DenseTensor(Dims dims);
    DenseTensor(Dims dims, Buffer data);
    DenseTensor(Dims dims, std::span<const double> data);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t order() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
    std::size_t size() const noexcept { return data_.size(); }

    /// Rows and columns of a frontal slice (n_1, n_2; a 1-way tensor has p = 1).
    std::size_t slice_rows() const noexcept;
    std::size_t slice_cols() const noexcept;
    /// Number of frontal slices, the product of extents of modes 3..d.
    std::size_t slice_count() const noexcept;

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double& at(std::span<const std::size_t> idx);
    double at(std::span<const std::size_t> idx) const;

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Dims dims_;
    Buffer data_;
};

/// Column-major offset of a multi-index: sum_k idx_k * prod_{j<k} dims_j.
std::size_t linear_index(std::span<const std::size_t> dims, std::span<const std::size_t> idx);

/// Contiguous m x p frontal slice, without copying.
ConstMatrixView frontal_slice(const DenseTensor& t, const SliceIndex& s);
MatrixView frontal_slice(DenseTensor& t, const SliceIndex& s);
ConstMatrixView frontal_slice(const DenseTensor& t, std::size_t flat);
MatrixView frontal_slice(DenseTensor& t, std::size_t flat);

/// Mode-k unfolding (k is 1-based). Column c holds the c-th mode-k fiber,
/// with the remaining modes ordered column-major.
Matrix unfold(const DenseTensor& t, std::size_t mode);

/// Inverse of unfold for a tensor with the given dims.
DenseTensor refold(const Matrix& unfolded, std::size_t mode, const Dims& dims);

double frobenius_norm(std::span<const double> values);
double frobenius_norm(const DenseTensor& t);
double frobenius_norm(const Matrix& m);

}  // namespace starm
