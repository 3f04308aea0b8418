// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starm/tensor.hpp"
#include "starm/transforms.hpp"

#include <cstddef>
#include <optional>
#include <string_view>

namespace starm {

/// How the P_k independent sub-products of a middle-mode TTM are scheduled.
enum class TtmVariant {
    /// One dispatch over the whole batch; work is split across sub-matrices
    /// and, when the batch is small, across row blocks within them.
    batched,
    /// Sequential loop; each product uses a multithreaded GEMM.
    loop,
    /// Parallel loop over sub-matrices, each a single-threaded GEMM.
    parfor,
};

std::string_view to_string(TtmVariant v);
std::optional<TtmVariant> parse_ttm_variant(std::string_view s);

/// Geometry of a mode-k TTM in column-major layout: the tensor is `batch`
/// contiguous `rows x inner` sub-matrices, each right-multiplied by the
/// transposed (out_cols x inner) matrix.
struct TtmPlan {
    std::size_t mode = 0;
    std::size_t rows = 0;      // prod_{i<k} n_i
    std::size_t batch = 0;     // prod_{i>k} n_i
    std::size_t inner = 0;     // n_k
    std::size_t out_cols = 0;  // J
    TtmVariant variant = TtmVariant::batched;

    bool last_mode() const noexcept { return batch == 1; }

    /// Throws for k < 3, k > d, or a matrix that does not have n_k columns.
    static TtmPlan make(const Dims& dims, std::size_t mode, std::size_t matrix_rows, std::size_t matrix_cols,
                        TtmVariant variant);
};

/// t x_k m, i.e. unfold(result, k) == m * unfold(t, k). `m` is J x n_k.
DenseTensor ttm(const DenseTensor& t, std::size_t mode, const Matrix& m, TtmVariant variant = TtmVariant::batched,
                int threads = 1);

/// t x_k M for a transform. An identity transform returns a copy.
DenseTensor ttm(const DenseTensor& t, std::size_t mode, const Transform& m,
                TtmVariant variant = TtmVariant::batched, int threads = 1);

/// t x_k M^T, the inverse of ttm for an orthonormal transform.
DenseTensor ttm_inverse(const DenseTensor& t, std::size_t mode, const Transform& m,
                        TtmVariant variant = TtmVariant::batched, int threads = 1);

/// Applies every transform of the set, modes 3..d in ascending order.
DenseTensor to_transform_domain(const DenseTensor& t, const TransformSet& ts,
                                TtmVariant variant = TtmVariant::batched, int threads = 1);

/// Applies every inverse transform, modes d..3 in descending order.
DenseTensor from_transform_domain(const DenseTensor& t, const TransformSet& ts,
                                  TtmVariant variant = TtmVariant::batched, int threads = 1);

}  // namespace starm
