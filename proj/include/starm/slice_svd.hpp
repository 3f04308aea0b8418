// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starm/detail/linalg.hpp"
#include "starm/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace starm {

enum class SvdStrategy {
    /// Slices distributed across threads, one single-threaded SVD each.
    slices_parallel,
    /// Slices one after another, each SVD using the threaded BLAS.
    svd_parallel,
};

std::string_view to_string(SvdStrategy s);
std::optional<SvdStrategy> parse_svd_strategy(std::string_view s);

using Ranks = std::vector<std::uint32_t>;

/// Thin SVDs of all frontal slices: slice i of U (m x r) and V (p x r) with
/// column i of S (length r, descending) reconstruct frontal slice i.
struct SliceSVDSet {
    DenseTensor U;  // m x r x n_3 x ... x n_d
    Matrix S;       // r x N
    DenseTensor V;  // p x r x n_3 x ... x n_d

    std::size_t rank() const noexcept { return S.rows(); }
    std::size_t slice_count() const noexcept { return S.cols(); }
};

/// Per-slice leading factors packed without padding: slice i contributes an
/// m x rho_i block to `u` and a rho_i x p block (diag(s) V^T) to `g`.
struct VariableRankFactors {
    std::size_t m = 0;
    std::size_t p = 0;
    Ranks ranks;
    Buffer u;
    Buffer g;
    /// Sum of squared singular values dropped from each slice.
    std::vector<double> tail_energy;

    /// Offsets of each slice's block, in elements; one past the end at index N.
    std::vector<std::size_t> u_offsets() const;
    std::vector<std::size_t> g_offsets() const;
};

SliceSVDSet svd_all_slices(const DenseTensor& ahat, SvdStrategy strategy = SvdStrategy::slices_parallel,
                           int threads = 1);

/// Singular values only (r x N); no singular vectors are formed.
Matrix svd_values_only(const DenseTensor& ahat, SvdStrategy strategy = SvdStrategy::slices_parallel,
                       int threads = 1);

/// Leading ranks[i] singular triplets of every slice, packed.
VariableRankFactors svd_truncated_slices(const DenseTensor& ahat, std::span<const std::uint32_t> ranks,
                                         SvdStrategy strategy = SvdStrategy::slices_parallel, int threads = 1);

/// Per-slice bidiagonal reductions kept between a values pass and a vectors
/// pass, so the second pass skips the reduction.
struct BidiagonalCache {
    std::size_t m = 0;
    std::size_t p = 0;
    std::vector<detail::BidiagonalFactors> slices;
};

struct CachedValues {
    Matrix values;  // r x N
    BidiagonalCache cache;
};

/// Values pass that keeps each slice's bidiagonal reduction.
CachedValues svd_values_cached(const DenseTensor& ahat, SvdStrategy strategy = SvdStrategy::slices_parallel,
                               int threads = 1);

/// Vectors pass over a cache produced by svd_values_cached.
VariableRankFactors svd_truncated_from_cache(const BidiagonalCache& cache, std::span<const std::uint32_t> ranks,
                                             SvdStrategy strategy = SvdStrategy::slices_parallel, int threads = 1);

}  // namespace starm
