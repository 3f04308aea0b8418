// SPDX-License-Identifier: Apache-2.0
#include "starm/bench.hpp"

#include "starm/error.hpp"
#include "starm/memory.hpp"

#include <algorithm>
#include <chrono>

namespace starm {

std::string_view to_string(BenchKernel k) {
    switch (k) {
        case BenchKernel::ttm: return "ttm";
        case BenchKernel::svd: return "svd";
        case BenchKernel::tsvdm1: return "tsvdm1";
        case BenchKernel::tsvdm2: return "tsvdm2";
    }
    return "unknown";
}

std::optional<BenchKernel> parse_bench_kernel(std::string_view s) {
    if (s == "ttm") return BenchKernel::ttm;
    if (s == "svd") return BenchKernel::svd;
    if (s == "tsvdm1") return BenchKernel::tsvdm1;
    if (s == "tsvdm2") return BenchKernel::tsvdm2;
    return std::nullopt;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

using Clock = std::chrono::steady_clock;

TransformSet make_transforms(const DenseTensor& t, TransformKind kind) {
    switch (kind) {
        case TransformKind::identity: return TransformSet::identity(t.dims());
        case TransformKind::dct: return TransformSet::dct(t.dims());
        case TransformKind::data_driven: return TransformSet::data_driven(t);
        case TransformKind::custom: break;
    }
    throw InvalidArgument("benchmarks support identity, dct, and data-driven transforms");
}

class Recorder {
public:
    Recorder(std::vector<BenchRow>& rows, CsvWriter* csv) : rows_(rows), csv_(csv) {}

    void add(BenchRow row) {
        if (csv_) csv_->write(row);
        rows_.push_back(std::move(row));
    }

private:
    std::vector<BenchRow>& rows_;
    CsvWriter* csv_;
};

template <class Fn>
std::pair<double, std::size_t> timed(Fn fn) {
    MemoryProbe probe;
    const auto t0 = Clock::now();
    fn();
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    return {secs, probe.peak_bytes()};
}

}  // namespace

std::vector<BenchRow> run_bench(const DenseTensor& t, const BenchConfig& cfg, CsvWriter* csv) {
    if (t.order() < 3) throw InvalidArgument("benchmarks need a tensor of order >= 3");
    if (cfg.trials < 1) throw InvalidArgument("at least one trial is required");
    for (int th : cfg.threads) {
        if (th < 1) throw InvalidArgument("thread counts must be at least 1");
    }
    std::vector<BenchRow> rows;
    Recorder rec(rows, csv);
    const std::string kernel(to_string(cfg.kernel));

    switch (cfg.kernel) {
        case BenchKernel::ttm: {
            for (auto variant : cfg.ttm_variants) {
                for (std::size_t k = 3; k <= t.order(); ++k) {
                    const auto m = dct_matrix(t.dim(k - 1));
                    for (int th : cfg.threads) {
                        for (int trial = 0; trial < cfg.trials; ++trial) {
                            auto [secs, peak] = timed([&] { (void)ttm(t, k, m.matrix(), variant, th); });
                            rec.add({kernel, std::string(to_string(variant)), std::to_string(k), th, trial, secs, peak});
                        }
                    }
                }
            }
            break;
        }
        case BenchKernel::svd: {
            for (auto strategy : cfg.svd_strategies) {
                for (int th : cfg.threads) {
                    for (int trial = 0; trial < cfg.trials; ++trial) {
                        auto [secs, peak] = timed([&] { (void)svd_all_slices(t, strategy, th); });
                        rec.add({kernel, std::string(to_string(strategy)), "-", th, trial, secs, peak});
                    }
                }
            }
            break;
        }
        case BenchKernel::tsvdm1: {
            const auto ts = make_transforms(t, cfg.transform);
            for (auto strategy : cfg.svd_strategies) {
                for (int th : cfg.threads) {
                    for (int trial = 0; trial < cfg.trials; ++trial) {
                        ExecOptions opts{th, TtmVariant::batched, strategy};
                        auto [secs, peak] = timed([&] { (void)tsvdm_fixed_rank(t, ts, cfg.rank, opts); });
                        rec.add({kernel, std::string(to_string(strategy)), "-", th, trial, secs, peak});
                    }
                }
            }
            break;
        }
        case BenchKernel::tsvdm2: {
            const auto ts = make_transforms(t, cfg.transform);
            for (auto strategy : cfg.tsvdm2_strategies) {
                for (int th : cfg.threads) {
                    for (int trial = 0; trial < cfg.trials; ++trial) {
                        ExecOptions opts{th, TtmVariant::batched, SvdStrategy::slices_parallel};
                        Compression result;
                        auto [secs, peak] = timed([&] { result = tsvdm_tolerance(t, ts, cfg.tolerance, strategy, opts); });
                        (void)secs;
                        const double stage_secs[] = {result.stages.ttm, result.stages.stage1_svd,
                                                     result.stages.threshold, result.stages.stage2_svd,
                                                     result.stages.pack};
                        for (std::size_t s = 0; s < std::size(kTsvdm2Stages); ++s) {
                            rec.add({kernel, std::string(to_string(strategy)), std::string(kTsvdm2Stages[s]), th, trial,
                                     stage_secs[s], peak});
                        }
                    }
                }
            }
            break;
        }
    }
    return rows;
}

std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows) {
    std::vector<BenchSummary> out;
    std::vector<std::vector<double>> samples;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const BenchSummary& s) {
            return s.kernel == r.kernel && s.variant == r.variant && s.mode == r.mode && s.threads == r.threads;
        });
        if (it == out.end()) {
            out.push_back({r.kernel, r.variant, r.mode, r.threads, 0.0});
            samples.emplace_back();
            it = out.end() - 1;
        }
        samples[static_cast<std::size_t>(it - out.begin())].push_back(r.seconds);
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].median_seconds = median(samples[i]);
    return out;
}

}  // namespace starm
