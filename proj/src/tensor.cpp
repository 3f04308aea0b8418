// SPDX-License-Identifier: Apache-2.0
#include "starm/tensor.hpp"

#include "starm/error.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace starm {

namespace {

void check_dims(const Dims& dims) {
    for (auto n : dims) {
        if (n == 0) throw InvalidArgument("tensor extents must be positive");
    }
}

void check_mode(std::size_t mode, std::size_t order) {
    if (mode < 1 || mode > order) {
        throw InvalidArgument("mode " + std::to_string(mode) + " out of range for order " +
                              std::to_string(order));
    }
}

}  // namespace

std::size_t element_count(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

Matrix::Matrix(std::size_t rows, std::size_t cols, Buffer data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) throw InvalidArgument("matrix data length does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

SliceIndex SliceIndex::from_trailing(std::span<const std::size_t> dims, std::vector<std::size_t> trailing) {
    const std::size_t order = dims.size();
    const std::size_t expected = order > 2 ? order - 2 : 0;
    if (trailing.size() != expected) throw InvalidArgument("slice index needs one entry per mode >= 3");
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (std::size_t k = 0; k < trailing.size(); ++k) {
        if (trailing[k] >= dims[k + 2]) throw InvalidArgument("slice index out of range");
        flat += trailing[k] * stride;
        stride *= dims[k + 2];
    }
    return {std::move(trailing), flat};
}

SliceIndex SliceIndex::from_flat(std::span<const std::size_t> dims, std::size_t flat) {
    const std::size_t order = dims.size();
    const auto trailing_dims = order > 2 ? dims.subspan(2) : std::span<const std::size_t>{};
    if (flat >= element_count(trailing_dims)) throw InvalidArgument("slice index out of range");
    SliceIndex s;
    s.flat = flat;
    for (auto n : trailing_dims) {
        s.trailing.push_back(flat % n);
        flat /= n;
    }
    return s;
}

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
    check_dims(dims_);
    data_.assign(element_count(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, Buffer data) : dims_(std::move(dims)), data_(std::move(data)) {
    check_dims(dims_);
    if (data_.size() != element_count(dims_)) throw InvalidArgument("tensor data length does not match dims");
}

DenseTensor::DenseTensor(Dims dims, std::span<const double> data)
    : DenseTensor(std::move(dims), Buffer(data.begin(), data.end())) {}

std::size_t DenseTensor::slice_rows() const noexcept { return dims_.empty() ? 1 : dims_[0]; }
std::size_t DenseTensor::slice_cols() const noexcept { return dims_.size() < 2 ? 1 : dims_[1]; }
std::size_t DenseTensor::slice_count() const noexcept {
    return dims_.size() <= 2 ? 1 : element_count(std::span(dims_).subspan(2));
}

double& DenseTensor::at(std::span<const std::size_t> idx) { return data_[linear_index(dims_, idx)]; }
double DenseTensor::at(std::span<const std::size_t> idx) const { return data_[linear_index(dims_, idx)]; }

std::size_t linear_index(std::span<const std::size_t> dims, std::span<const std::size_t> idx) {
    if (idx.size() != dims.size()) throw InvalidArgument("index arity does not match tensor order");
    std::size_t offset = 0;
    std::size_t stride = 1;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (idx[k] >= dims[k]) throw InvalidArgument("index out of range in mode " + std::to_string(k + 1));
        offset += idx[k] * stride;
        stride *= dims[k];
    }
    return offset;
}

ConstMatrixView frontal_slice(const DenseTensor& t, std::size_t flat) {
    if (flat >= t.slice_count()) throw InvalidArgument("slice index out of range");
    const auto m = t.slice_rows();
    const auto p = t.slice_cols();
    return {t.data() + flat * m * p, m, p};
}

MatrixView frontal_slice(DenseTensor& t, std::size_t flat) {
    if (flat >= t.slice_count()) throw InvalidArgument("slice index out of range");
    const auto m = t.slice_rows();
    const auto p = t.slice_cols();
    return {t.data() + flat * m * p, m, p};
}

ConstMatrixView frontal_slice(const DenseTensor& t, const SliceIndex& s) { return frontal_slice(t, s.flat); }
MatrixView frontal_slice(DenseTensor& t, const SliceIndex& s) { return frontal_slice(t, s.flat); }

Matrix unfold(const DenseTensor& t, std::size_t mode) {
    check_mode(mode, t.order());
    const auto& dims = t.dims();
    const auto n = dims[mode - 1];
    const auto left = element_count(std::span(dims).first(mode - 1));
    const auto right = element_count(std::span(dims).subspan(mode));
    Matrix out(n, left * right);
    const double* src = t.data();
    for (std::size_t r = 0; r < right; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const double* fiber_block = src + (r * n + i) * left;
            for (std::size_t l = 0; l < left; ++l) out(i, l + r * left) = fiber_block[l];
        }
    }
    return out;
}

DenseTensor refold(const Matrix& unfolded, std::size_t mode, const Dims& dims) {
    check_mode(mode, dims.size());
    const auto n = dims[mode - 1];
    const auto left = element_count(std::span(dims).first(mode - 1));
    const auto right = element_count(std::span(dims).subspan(mode));
    if (unfolded.rows() != n || unfolded.cols() != left * right) {
        throw InvalidArgument("unfolded matrix shape does not match dims");
    }
    DenseTensor out(dims);
    double* dst = out.data();
    for (std::size_t r = 0; r < right; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            double* fiber_block = dst + (r * n + i) * left;
            for (std::size_t l = 0; l < left; ++l) fiber_block[l] = unfolded(i, l + r * left);
        }
    }
    return out;
}

double frobenius_norm(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

double frobenius_norm(const DenseTensor& t) { return frobenius_norm(t.values()); }
double frobenius_norm(const Matrix& m) { return frobenius_norm(std::span(m.values())); }

}  // namespace starm
