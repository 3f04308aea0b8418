// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starm/slice_svd.hpp"
#include "starm/tensor.hpp"
#include "starm/transforms.hpp"
#include "starm/ttm.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace starm {

/// Parallel execution knobs shared by the decomposition entry points.
struct ExecOptions {
    int threads = 1;
    TtmVariant ttm = TtmVariant::batched;
    SvdStrategy svd = SvdStrategy::slices_parallel;
};

/// C = A *M B: forward transform of both operands, independent slice
/// products, inverse transform. A is m x p x ..., B is p x l x ... with the
/// same trailing extents.
DenseTensor starm_product(const DenseTensor& a, const DenseTensor& b, const TransformSet& ts,
                          const ExecOptions& opts = {});

/// Full factorization A = U *M S *M V^T, factors held in the transform domain.
struct TSVDMResult {
    SliceSVDSet factors;
    TransformSet transforms;
};

TSVDMResult full_tsvdm(const DenseTensor& a, const TransformSet& ts, const ExecOptions& opts = {});
DenseTensor reconstruct(const TSVDMResult& f, const ExecOptions& opts = {});

/// Global truncation threshold over all squared singular values.
struct ThresholdResult {
    std::vector<double> v;  // squared values, ascending
    std::vector<double> w;  // cumulative sums of v
    /// Number of leading entries of v designated for discard (0 = none).
    std::size_t J = 0;
    /// v[J-1], a squared singular value; 0 when J == 0. Values with
    /// sigma^2 > tau are kept.
    double tau = 0.0;
    Ranks ranks;
    double discarded_energy = 0.0;
    double total_energy = 0.0;
};

/// Largest J with w_J / ||S||_F^2 < epsilon^2. If values equal to tau remain
/// beyond J, discarding them all would break the tolerance, so the tied
/// values are kept and J, tau move down to the last smaller value.
ThresholdResult compute_threshold(const Matrix& s, double epsilon);

enum class Method : std::uint8_t { tsvdm1 = 1, tsvdm2 = 2 };
std::string_view to_string(Method m);

enum class Tsvdm2Strategy { truncate, compute_efficient, memory_efficient };
std::string_view to_string(Tsvdm2Strategy s);
std::optional<Tsvdm2Strategy> parse_tsvdm2_strategy(std::string_view s);

/// Variable-rank truncated factors: slice i stores U_i (m x rho_i) and
/// G_i = S_i V_i^T (rho_i x p), packed back to back with no padding.
struct CompressedTensor {
    Dims dims;
    TransformSet transforms;
    Method method = Method::tsvdm2;
    double parameter = 0.0;  // r for tsvdm1, epsilon for tsvdm2
    Ranks ranks;
    Buffer u;
    Buffer g;

    std::size_t slice_rows() const { return dims.at(0); }
    std::size_t slice_cols() const { return dims.at(1); }
    std::size_t rank_sum() const;

    /// Throws InvalidArgument if shapes, ranks, and payload sizes disagree.
    void validate() const;

    friend bool operator==(const CompressedTensor&, const CompressedTensor&) = default;
};

struct StageTimes {
    double ttm = 0.0;
    double stage1_svd = 0.0;
    double threshold = 0.0;
    double stage2_svd = 0.0;
    double pack = 0.0;
};

struct Compression {
    CompressedTensor tensor;
    /// Squared Frobenius norm of everything truncated away.
    double discarded_energy = 0.0;
    /// ||A||_F^2.
    double input_energy = 0.0;
    StageTimes stages;

    /// sqrt(discarded / ||A||^2), the error implied by the truncation.
    double relative_error() const;
};

/// Uniform rank r in every slice.
Compression tsvdm_fixed_rank(const DenseTensor& a, const TransformSet& ts, std::size_t r,
                             const ExecOptions& opts = {});

/// Per-slice ranks from a global energy threshold so that the relative
/// reconstruction error stays below epsilon.
Compression tsvdm_tolerance(const DenseTensor& a, const TransformSet& ts, double epsilon,
                            Tsvdm2Strategy strategy = Tsvdm2Strategy::memory_efficient,
                            const ExecOptions& opts = {});

DenseTensor reconstruct(const CompressedTensor& c, const ExecOptions& opts = {});

/// prod(dims) / (sum_i rho_i (m + p) + stored transform entries). +inf when
/// nothing is stored.
double compression_ratio(const CompressedTensor& c);

/// ||a - b||_F / ||a||_F. Throws on shape mismatch.
double relative_error(const DenseTensor& a, const DenseTensor& b);

}  // namespace starm
