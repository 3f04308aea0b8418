// SPDX-License-Identifier: Apache-2.0
#include "starm/tsvdm.hpp"

#include "starm/detail/linalg.hpp"
#include "starm/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace starm {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::tsvdm1: return "tsvdm1";
        case Method::tsvdm2: return "tsvdm2";
    }
    return "unknown";
}

std::string_view to_string(Tsvdm2Strategy s) {
    switch (s) {
        case Tsvdm2Strategy::truncate: return "truncate";
        case Tsvdm2Strategy::compute_efficient: return "compute";
        case Tsvdm2Strategy::memory_efficient: return "memory";
    }
    return "unknown";
}

std::optional<Tsvdm2Strategy> parse_tsvdm2_strategy(std::string_view s) {
    if (s == "truncate") return Tsvdm2Strategy::truncate;
    if (s == "compute" || s == "compute-efficient") return Tsvdm2Strategy::compute_efficient;
    if (s == "memory" || s == "memory-efficient") return Tsvdm2Strategy::memory_efficient;
    return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_decomposable(const DenseTensor& a, const TransformSet& ts, const ExecOptions& opts) {
    if (a.order() < 3) throw InvalidArgument("decomposition needs a tensor of order >= 3");
    if (opts.threads < 1) throw InvalidArgument("thread count must be at least 1");
    ts.check_matches(a.dims());
}

double squared_norm(const DenseTensor& t) {
    double s = 0.0;
    for (double v : t.values()) s += v * v;
    return s;
}

// Runs fn(i) over slices with single-threaded BLAS calls inside.
template <class Fn>
void parallel_slices(std::size_t count, int threads, Fn fn) {
    detail::BlasThreads scope(1);
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for num_threads(threads) schedule(dynamic) if (threads > 1 && n > 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(static_cast<std::size_t>(i));
}

CompressedTensor make_compressed(const DenseTensor& a, const TransformSet& ts, Method method, double parameter,
                                 VariableRankFactors&& f) {
    CompressedTensor c;
    c.dims = a.dims();
    c.transforms = ts;
    c.method = method;
    c.parameter = parameter;
    c.ranks = std::move(f.ranks);
    c.u = std::move(f.u);
    c.g = std::move(f.g);
    return c;
}

}  // namespace

DenseTensor starm_product(const DenseTensor& a, const DenseTensor& b, const TransformSet& ts,
                          const ExecOptions& opts) {
    if (a.order() < 3 || a.order() != b.order()) throw InvalidArgument("star-M product needs operands of equal order >= 3");
    if (a.dim(1) != b.dim(0)) {
        throw InvalidArgument("inner dimension mismatch: " + std::to_string(a.dim(1)) + " vs " +
                              std::to_string(b.dim(0)));
    }
    for (std::size_t k = 2; k < a.order(); ++k) {
        if (a.dim(k) != b.dim(k)) throw InvalidArgument("trailing dimension mismatch in mode " + std::to_string(k + 1));
    }
    check_decomposable(a, ts, opts);

    const auto ahat = to_transform_domain(a, ts, opts.ttm, opts.threads);
    const auto bhat = to_transform_domain(b, ts, opts.ttm, opts.threads);
    const auto m = a.dim(0);
    const auto p = a.dim(1);
    const auto l = b.dim(1);
    Dims dims = a.dims();
    dims[1] = l;
    DenseTensor chat(dims);
    parallel_slices(chat.slice_count(), opts.threads, [&](std::size_t i) {
        detail::gemm(detail::Op::none, detail::Op::none, m, l, p, 1.0, ahat.data() + i * m * p, m,
                     bhat.data() + i * p * l, p, 0.0, chat.data() + i * m * l, m);
    });
    return from_transform_domain(chat, ts, opts.ttm, opts.threads);
}

TSVDMResult full_tsvdm(const DenseTensor& a, const TransformSet& ts, const ExecOptions& opts) {
    check_decomposable(a, ts, opts);
    const auto ahat = to_transform_domain(a, ts, opts.ttm, opts.threads);
    return {svd_all_slices(ahat, opts.svd, opts.threads), ts};
}

DenseTensor reconstruct(const TSVDMResult& f, const ExecOptions& opts) {
    const auto& U = f.factors.U;
    const auto& V = f.factors.V;
    const auto& S = f.factors.S;
    const auto m = U.dim(0);
    const auto p = V.dim(0);
    const auto r = S.rows();
    Dims dims = U.dims();
    dims[1] = p;
    f.transforms.check_matches(dims);

    DenseTensor chat(dims);
    parallel_slices(S.cols(), opts.threads, [&](std::size_t i) {
        Buffer us(U.data() + i * m * r, U.data() + (i + 1) * m * r);
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t row = 0; row < m; ++row) us[row + j * m] *= S(j, i);
        detail::gemm(detail::Op::none, detail::Op::transpose, m, p, r, 1.0, us.data(), m, V.data() + i * p * r, p,
                     0.0, chat.data() + i * m * p, m);
    });
    return from_transform_domain(chat, f.transforms, opts.ttm, opts.threads);
}

ThresholdResult compute_threshold(const Matrix& s, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("tolerance must lie in (0, 1)");
    ThresholdResult t;
    const auto r = s.rows();
    const auto count = s.cols();

    t.v.reserve(r * count);
    for (double x : s.values()) {
        if (!(x >= 0.0)) throw InvalidArgument("singular values must be non-negative");
        t.v.push_back(x * x);
    }
    std::sort(t.v.begin(), t.v.end());
    t.w.resize(t.v.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < t.v.size(); ++k) {
        acc += t.v[k];
        t.w[k] = acc;
    }
    t.total_energy = acc;

    if (acc > 0.0) {
        const double eps2 = epsilon * epsilon;
        // w is non-decreasing, so the qualifying indices form a prefix.
        const auto first_bad =
            std::partition_point(t.w.begin(), t.w.end(), [&](double wk) { return wk / acc < eps2; });
        t.J = static_cast<std::size_t>(first_bad - t.w.begin());
        if (t.J > 0 && t.J < t.v.size() && t.v[t.J] == t.v[t.J - 1]) {
            // Values tied with tau continue past J: keep the whole tie.
            const auto tie_begin = std::lower_bound(t.v.begin(), t.v.end(), t.v[t.J - 1]);
            t.J = static_cast<std::size_t>(tie_begin - t.v.begin());
        }
        t.tau = t.J > 0 ? t.v[t.J - 1] : 0.0;
        t.discarded_energy = t.J > 0 ? t.w[t.J - 1] : 0.0;
    }

    t.ranks.assign(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t rho = 0;
        for (std::size_t j = 0; j < r; ++j) {
            const double x = s(j, i);
            if (x * x > t.tau) ++rho;
        }
        t.ranks[i] = rho;
    }
    return t;
}

double Compression::relative_error() const {
    if (input_energy == 0.0) return 0.0;
    return std::sqrt(discarded_energy / input_energy);
}

Compression tsvdm_fixed_rank(const DenseTensor& a, const TransformSet& ts, std::size_t r, const ExecOptions& opts) {
    check_decomposable(a, ts, opts);
    const auto max_rank = std::min(a.dim(0), a.dim(1));
    if (r < 1 || r > max_rank) {
        throw InvalidArgument("rank must lie in [1, " + std::to_string(max_rank) + "], got " + std::to_string(r));
    }
    Compression out;
    out.input_energy = squared_norm(a);

    auto t0 = Clock::now();
    const auto ahat = to_transform_domain(a, ts, opts.ttm, opts.threads);
    out.stages.ttm = seconds_since(t0);

    t0 = Clock::now();
    const Ranks ranks(ahat.slice_count(), static_cast<std::uint32_t>(r));
    auto f = svd_truncated_slices(ahat, ranks, opts.svd, opts.threads);
    out.stages.stage2_svd = seconds_since(t0);

    for (double e : f.tail_energy) out.discarded_energy += e;
    out.tensor = make_compressed(a, ts, Method::tsvdm1, static_cast<double>(r), std::move(f));
    return out;
}

Compression tsvdm_tolerance(const DenseTensor& a, const TransformSet& ts, double epsilon, Tsvdm2Strategy strategy,
                            const ExecOptions& opts) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("tolerance must lie in (0, 1)");
    check_decomposable(a, ts, opts);
    Compression out;
    out.input_energy = squared_norm(a);

    auto t0 = Clock::now();
    const auto ahat = to_transform_domain(a, ts, opts.ttm, opts.threads);
    out.stages.ttm = seconds_since(t0);

    const auto m = ahat.slice_rows();
    const auto p = ahat.slice_cols();
    VariableRankFactors factors;

    switch (strategy) {
        case Tsvdm2Strategy::truncate: {
            t0 = Clock::now();
            auto full = svd_all_slices(ahat, opts.svd, opts.threads);
            out.stages.stage1_svd = seconds_since(t0);

            t0 = Clock::now();
            auto th = compute_threshold(full.S, epsilon);
            out.stages.threshold = seconds_since(t0);
            out.discarded_energy = th.discarded_energy;

            t0 = Clock::now();
            const auto r = full.S.rows();
            factors.m = m;
            factors.p = p;
            factors.ranks = th.ranks;
            const auto u_off = factors.u_offsets();
            const auto g_off = factors.g_offsets();
            factors.u.assign(u_off.back(), 0.0);
            factors.g.assign(g_off.back(), 0.0);
            parallel_slices(th.ranks.size(), opts.threads, [&](std::size_t i) {
                const std::size_t rho = th.ranks[i];
                const double* u = full.U.data() + i * m * r;
                const double* v = full.V.data() + i * p * r;
                std::copy(u, u + m * rho, factors.u.data() + u_off[i]);
                double* g = factors.g.data() + g_off[i];
                for (std::size_t c = 0; c < p; ++c)
                    for (std::size_t j = 0; j < rho; ++j) g[j + c * rho] = full.S(j, i) * v[c + j * p];
            });
            out.stages.pack = seconds_since(t0);
            break;
        }
        case Tsvdm2Strategy::compute_efficient: {
            t0 = Clock::now();
            auto cached = svd_values_cached(ahat, opts.svd, opts.threads);
            out.stages.stage1_svd = seconds_since(t0);

            t0 = Clock::now();
            auto th = compute_threshold(cached.values, epsilon);
            out.stages.threshold = seconds_since(t0);
            out.discarded_energy = th.discarded_energy;

            t0 = Clock::now();
            factors = svd_truncated_from_cache(cached.cache, th.ranks, opts.svd, opts.threads);
            out.stages.stage2_svd = seconds_since(t0);
            break;
        }
        case Tsvdm2Strategy::memory_efficient: {
            t0 = Clock::now();
            auto values = svd_values_only(ahat, opts.svd, opts.threads);
            out.stages.stage1_svd = seconds_since(t0);

            t0 = Clock::now();
            auto th = compute_threshold(values, epsilon);
            out.stages.threshold = seconds_since(t0);
            out.discarded_energy = th.discarded_energy;

            t0 = Clock::now();
            factors = svd_truncated_slices(ahat, th.ranks, opts.svd, opts.threads);
            out.stages.stage2_svd = seconds_since(t0);
            break;
        }
    }

    t0 = Clock::now();
    out.tensor = make_compressed(a, ts, Method::tsvdm2, epsilon, std::move(factors));
    out.stages.pack += seconds_since(t0);
    return out;
}

std::size_t CompressedTensor::rank_sum() const {
    std::size_t s = 0;
    for (auto r : ranks) s += r;
    return s;
}

void CompressedTensor::validate() const {
    if (dims.size() < 3) throw InvalidArgument("compressed tensor must have order >= 3");
    for (auto n : dims) {
        if (n == 0) throw InvalidArgument("compressed tensor has a zero extent");
    }
    transforms.check_matches(dims);
    const auto count = element_count(std::span(dims).subspan(2));
    if (ranks.size() != count) {
        throw InvalidArgument("compressed tensor has " + std::to_string(ranks.size()) + " ranks for " +
                              std::to_string(count) + " slices");
    }
    const auto max_rank = std::min(dims[0], dims[1]);
    for (auto r : ranks) {
        if (r > max_rank) throw InvalidArgument("compressed rank exceeds min(m,p)");
    }
    if (method == Method::tsvdm1) {
        for (auto r : ranks) {
            if (static_cast<double>(r) != parameter) throw InvalidArgument("tsvdm1 ranks must all equal r");
        }
    } else if (method != Method::tsvdm2) {
        throw InvalidArgument("unknown compression method");
    }
    const auto total = rank_sum();
    if (u.size() != total * dims[0] || g.size() != total * dims[1]) {
        throw InvalidArgument("factor payload size does not match ranks");
    }
}

DenseTensor reconstruct(const CompressedTensor& c, const ExecOptions& opts) {
    c.validate();
    if (opts.threads < 1) throw InvalidArgument("thread count must be at least 1");
    const auto m = c.slice_rows();
    const auto p = c.slice_cols();
    std::vector<std::size_t> u_off(c.ranks.size() + 1, 0);
    std::vector<std::size_t> g_off(c.ranks.size() + 1, 0);
    for (std::size_t i = 0; i < c.ranks.size(); ++i) {
        u_off[i + 1] = u_off[i] + m * c.ranks[i];
        g_off[i + 1] = g_off[i] + p * c.ranks[i];
    }
    DenseTensor chat(c.dims);
    parallel_slices(c.ranks.size(), opts.threads, [&](std::size_t i) {
        const std::size_t rho = c.ranks[i];
        if (rho == 0) return;
        detail::gemm(detail::Op::none, detail::Op::none, m, p, rho, 1.0, c.u.data() + u_off[i], m,
                     c.g.data() + g_off[i], rho, 0.0, chat.data() + i * m * p, m);
    });
    return from_transform_domain(chat, c.transforms, opts.ttm, opts.threads);
}

double compression_ratio(const CompressedTensor& c) {
    const double original = static_cast<double>(element_count(c.dims));
    double stored = static_cast<double>(c.rank_sum()) * static_cast<double>(c.slice_rows() + c.slice_cols());
    for (const auto& t : c.transforms.transforms()) {
        if (is_stored(t.kind())) stored += static_cast<double>(t.size() * t.size());
    }
    if (stored == 0.0) return std::numeric_limits<double>::infinity();
    return original / stored;
}

double relative_error(const DenseTensor& a, const DenseTensor& b) {
    if (a.dims() != b.dims()) throw InvalidArgument("tensor shapes differ");
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        diff += d * d;
        norm += a[i] * a[i];
    }
    if (norm == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(diff / norm);
}

}  // namespace starm
