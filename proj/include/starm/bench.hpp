// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starm/codec.hpp"
#include "starm/slice_svd.hpp"
#include "starm/tensor.hpp"
#include "starm/transforms.hpp"
#include "starm/tsvdm.hpp"
#include "starm/ttm.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace starm {

enum class BenchKernel { ttm, svd, tsvdm1, tsvdm2 };

std::string_view to_string(BenchKernel k);
std::optional<BenchKernel> parse_bench_kernel(std::string_view s);

struct BenchConfig {
    BenchKernel kernel = BenchKernel::ttm;
    std::vector<int> threads{1, 2, 4};
    int trials = 3;
    std::vector<TtmVariant> ttm_variants{TtmVariant::batched, TtmVariant::loop, TtmVariant::parfor};
    std::vector<SvdStrategy> svd_strategies{SvdStrategy::slices_parallel, SvdStrategy::svd_parallel};
    std::vector<Tsvdm2Strategy> tsvdm2_strategies{Tsvdm2Strategy::truncate, Tsvdm2Strategy::compute_efficient,
                                                  Tsvdm2Strategy::memory_efficient};
    /// Transforms for the decomposition kernels; the ttm kernel always uses DCT.
    TransformKind transform = TransformKind::dct;
    std::size_t rank = 1;
    double tolerance = 0.1;
};

/// Stage names of the tsvdm2 breakdown rows, in emission order.
inline constexpr std::string_view kTsvdm2Stages[] = {"ttm", "stage1-svd", "threshold", "stage2-svd", "pack"};

/// Runs every configuration `trials` times. One row per timed run (per stage
/// for tsvdm2), each also written to `csv` when given.
///   ttm:    variants x modes 3..d x threads x trials, mode = k
///   svd:    strategies x threads x trials, input used as the transformed tensor
///   tsvdm1: svd strategies x threads x trials
///   tsvdm2: strategies x threads x trials x stages, mode = stage name
std::vector<BenchRow> run_bench(const DenseTensor& t, const BenchConfig& cfg, CsvWriter* csv = nullptr);

/// Median seconds per (kernel, variant, mode, threads) group, in first-seen order.
struct BenchSummary {
    std::string kernel, variant, mode;
    int threads = 1;
    double median_seconds = 0.0;
};
std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows);

double median(std::vector<double> values);

}  // namespace starm
