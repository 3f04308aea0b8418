// SPDX-License-Identifier: Apache-2.0
#include "starm/ttm.hpp"

#include "starm/detail/linalg.hpp"
#include "starm/error.hpp"

#include <algorithm>
#include <string>

namespace starm {

std::string_view to_string(TtmVariant v) {
    switch (v) {
        case TtmVariant::batched: return "batched";
        case TtmVariant::loop: return "loop";
        case TtmVariant::parfor: return "parfor";
    }
    return "unknown";
}

std::optional<TtmVariant> parse_ttm_variant(std::string_view s) {
    if (s == "batched") return TtmVariant::batched;
    if (s == "loop") return TtmVariant::loop;
    if (s == "parfor") return TtmVariant::parfor;
    return std::nullopt;
}

TtmPlan TtmPlan::make(const Dims& dims, std::size_t mode, std::size_t matrix_rows, std::size_t matrix_cols,
                      TtmVariant variant) {
    if (mode < 3) throw InvalidArgument("TTM is only defined for modes k >= 3, got " + std::to_string(mode));
    if (mode > dims.size()) {
        throw InvalidArgument("mode " + std::to_string(mode) + " exceeds tensor order " + std::to_string(dims.size()));
    }
    const std::size_t inner = dims[mode - 1];
    if (matrix_cols != inner) {
        throw InvalidArgument("TTM matrix has " + std::to_string(matrix_cols) + " columns, mode " +
                              std::to_string(mode) + " has extent " + std::to_string(inner));
    }
    if (matrix_rows == 0) throw InvalidArgument("TTM matrix must have at least one row");
    TtmPlan plan;
    plan.mode = mode;
    plan.rows = element_count(std::span(dims).first(mode - 1));
    plan.batch = element_count(std::span(dims).subspan(mode));
    plan.inner = inner;
    plan.out_cols = matrix_rows;
    plan.variant = variant;
    return plan;
}

namespace {

// Y_b = X_b * op(B) for every b, where op(B) is inner x out_cols.
void run_plan(const TtmPlan& plan, const double* x, const double* b, std::size_t ldb, detail::Op op_b, double* y,
              int threads) {
    const auto rows = plan.rows;
    const auto inner = plan.inner;
    const auto out = plan.out_cols;
    const auto in_stride = rows * inner;
    const auto out_stride = rows * out;
    const auto nb = static_cast<std::ptrdiff_t>(plan.batch);

    switch (plan.variant) {
        case TtmVariant::loop: {
            detail::BlasThreads scope(threads);
            for (std::ptrdiff_t i = 0; i < nb; ++i) {
                detail::gemm(detail::Op::none, op_b, rows, out, inner, 1.0, x + i * in_stride, rows, b, ldb, 0.0,
                             y + i * out_stride, rows);
            }
            break;
        }
        case TtmVariant::parfor: {
            detail::BlasThreads scope(1);
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1 && nb > 1)
            for (std::ptrdiff_t i = 0; i < nb; ++i) {
                detail::gemm(detail::Op::none, op_b, rows, out, inner, 1.0, x + i * in_stride, rows, b, ldb, 0.0,
                             y + i * out_stride, rows);
            }
            break;
        }
        case TtmVariant::batched: {
            // Same matrix for every batch entry (stride zero). When the batch
            // is smaller than the thread count, sub-matrices are also split by
            // rows so the last-mode case still spreads across threads.
            const std::size_t blocks =
                plan.batch >= static_cast<std::size_t>(threads)
                    ? 1
                    : std::min(rows, (static_cast<std::size_t>(threads) + plan.batch - 1) / plan.batch);
            const std::size_t block_rows = (rows + blocks - 1) / blocks;
            const auto tasks = static_cast<std::ptrdiff_t>(plan.batch * blocks);
            detail::BlasThreads scope(1);
#pragma omp parallel for num_threads(threads) schedule(dynamic) if (threads > 1 && tasks > 1)
            for (std::ptrdiff_t task = 0; task < tasks; ++task) {
                const auto i = static_cast<std::size_t>(task) / blocks;
                const auto r0 = (static_cast<std::size_t>(task) % blocks) * block_rows;
                if (r0 >= rows) continue;
                const auto nr = std::min(block_rows, rows - r0);
                detail::gemm(detail::Op::none, op_b, nr, out, inner, 1.0, x + i * in_stride + r0, rows, b, ldb, 0.0,
                             y + i * out_stride + r0, rows);
            }
            break;
        }
    }
}

void check_threads(int threads) {
    if (threads < 1) throw InvalidArgument("thread count must be at least 1");
}

}  // namespace

DenseTensor ttm(const DenseTensor& t, std::size_t mode, const Matrix& m, TtmVariant variant, int threads) {
    check_threads(threads);
    const auto plan = TtmPlan::make(t.dims(), mode, m.rows(), m.cols(), variant);
    Dims out_dims = t.dims();
    out_dims[mode - 1] = plan.out_cols;
    DenseTensor out(std::move(out_dims));
    run_plan(plan, t.data(), m.data(), m.rows(), detail::Op::transpose, out.data(), threads);
    return out;
}

DenseTensor ttm(const DenseTensor& t, std::size_t mode, const Transform& m, TtmVariant variant, int threads) {
    if (m.kind() == TransformKind::identity) {
        check_threads(threads);
        TtmPlan::make(t.dims(), mode, m.size(), m.size(), variant);
        return t;
    }
    return ttm(t, mode, m.matrix(), variant, threads);
}

DenseTensor ttm_inverse(const DenseTensor& t, std::size_t mode, const Transform& m, TtmVariant variant,
                        int threads) {
    check_threads(threads);
    const auto plan = TtmPlan::make(t.dims(), mode, m.size(), m.size(), variant);
    if (m.kind() == TransformKind::identity) return t;
    DenseTensor out(t.dims());
    // unfold(out) = M^T unfold(t): right-multiply each sub-matrix by M.
    run_plan(plan, t.data(), m.matrix().data(), m.size(), detail::Op::none, out.data(), threads);
    return out;
}

DenseTensor to_transform_domain(const DenseTensor& t, const TransformSet& ts, TtmVariant variant, int threads) {
    check_threads(threads);
    ts.check_matches(t.dims());
    std::optional<DenseTensor> cur;
    for (std::size_t k = 3; k <= t.order(); ++k) {
        const auto& m = ts.for_mode(k);
        if (m.kind() == TransformKind::identity) continue;
        cur = ttm(cur ? *cur : t, k, m.matrix(), variant, threads);
    }
    return cur ? std::move(*cur) : t;
}

DenseTensor from_transform_domain(const DenseTensor& t, const TransformSet& ts, TtmVariant variant, int threads) {
    check_threads(threads);
    ts.check_matches(t.dims());
    std::optional<DenseTensor> cur;
    for (std::size_t k = t.order(); k >= 3; --k) {
        const auto& m = ts.for_mode(k);
        if (m.kind() == TransformKind::identity) continue;
        cur = ttm_inverse(cur ? *cur : t, k, m, variant, threads);
    }
    return cur ? std::move(*cur) : t;
}

}  // namespace starm
