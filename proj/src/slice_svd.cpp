// SPDX-License-Identifier: Apache-2.0
#include "starm/slice_svd.hpp"

#include "starm/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

namespace starm {

std::string_view to_string(SvdStrategy s) {
    switch (s) {
        case SvdStrategy::slices_parallel: return "slices";
        case SvdStrategy::svd_parallel: return "svd";
    }
    return "unknown";
}

std::optional<SvdStrategy> parse_svd_strategy(std::string_view s) {
    if (s == "slices" || s == "slices-parallel") return SvdStrategy::slices_parallel;
    if (s == "svd" || s == "svd-parallel") return SvdStrategy::svd_parallel;
    return std::nullopt;
}

std::vector<std::size_t> VariableRankFactors::u_offsets() const {
    std::vector<std::size_t> off(ranks.size() + 1, 0);
    for (std::size_t i = 0; i < ranks.size(); ++i) off[i + 1] = off[i] + m * ranks[i];
    return off;
}

std::vector<std::size_t> VariableRankFactors::g_offsets() const {
    std::vector<std::size_t> off(ranks.size() + 1, 0);
    for (std::size_t i = 0; i < ranks.size(); ++i) off[i + 1] = off[i] + p * ranks[i];
    return off;
}

namespace {

void check_input(const DenseTensor& ahat, int threads) {
    if (ahat.order() < 3) throw InvalidArgument("slice-wise SVD needs a tensor of order >= 3");
    if (threads < 1) throw InvalidArgument("thread count must be at least 1");
}

Dims factor_dims(const Dims& dims, std::size_t rows, std::size_t r) {
    Dims out = dims;
    out[0] = rows;
    out[1] = r;
    return out;
}

// Copies slice i into `dst`; returns false if the slice is all zeros.
bool load_slice(const DenseTensor& t, std::size_t i, double* dst) {
    const auto view = frontal_slice(t, i);
    const std::size_t len = view.rows() * view.cols();
    bool nonzero = false;
    for (std::size_t k = 0; k < len; ++k) {
        const double v = view.data()[k];
        if (!std::isfinite(v)) throw NonFiniteSlice(i);
        nonzero = nonzero || v != 0.0;
        dst[k] = v;
    }
    return nonzero;
}

// Runs body(worker, slice) for every slice under the chosen strategy. Each
// thread builds one worker (its private scratch) and reuses it across slices.
template <class MakeWorker, class Body>
void for_each_slice(std::size_t count, SvdStrategy strategy, int threads, MakeWorker make_worker, Body body) {
    if (strategy == SvdStrategy::svd_parallel || threads == 1 || count <= 1) {
        detail::BlasThreads scope(strategy == SvdStrategy::svd_parallel ? threads : 1);
        auto worker = make_worker();
        for (std::size_t i = 0; i < count; ++i) body(worker, i);
        return;
    }

    detail::BlasThreads scope(1);
    std::exception_ptr error;
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel num_threads(threads)
    {
        std::optional<decltype(make_worker())> worker;
        try {
            worker.emplace(make_worker());
        } catch (...) {
#pragma omp critical(starm_slice_error)
            if (!error) error = std::current_exception();
        }
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            if (!worker) continue;
            try {
                body(*worker, static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(starm_slice_error)
                if (!error) error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

void check_ranks(std::span<const std::uint32_t> ranks, std::size_t count, std::size_t r) {
    if (ranks.size() != count) {
        throw InvalidArgument("expected " + std::to_string(count) + " ranks, got " + std::to_string(ranks.size()));
    }
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] > r) {
            throw InvalidArgument("rank " + std::to_string(ranks[i]) + " for slice " + std::to_string(i) +
                                  " exceeds min(m,p) = " + std::to_string(r));
        }
    }
}

VariableRankFactors allocate_factors(std::size_t m, std::size_t p, std::span<const std::uint32_t> ranks) {
    VariableRankFactors f;
    f.m = m;
    f.p = p;
    f.ranks.assign(ranks.begin(), ranks.end());
    std::size_t total = 0;
    for (auto r : ranks) total += r;
    f.u.assign(total * m, 0.0);
    f.g.assign(total * p, 0.0);
    f.tail_energy.assign(ranks.size(), 0.0);
    return f;
}

// Writes the leading `rho` columns of u (m x r) and rows of diag(s) vt
// (vt is r x p) into the packed blocks.
void pack_slice(std::size_t m, std::size_t p, std::size_t r, std::size_t rho, const double* s, const double* u,
                const double* vt, double* u_out, double* g_out) {
    std::copy(u, u + m * rho, u_out);
    for (std::size_t c = 0; c < p; ++c)
        for (std::size_t j = 0; j < rho; ++j) g_out[j + c * rho] = s[j] * vt[j + c * r];
}

double tail(const double* s, std::size_t r, std::size_t rho) {
    double e = 0.0;
    for (std::size_t j = rho; j < r; ++j) e += s[j] * s[j];
    return e;
}

}  // namespace

SliceSVDSet svd_all_slices(const DenseTensor& ahat, SvdStrategy strategy, int threads) {
    check_input(ahat, threads);
    const auto m = ahat.slice_rows();
    const auto p = ahat.slice_cols();
    const auto r = std::min(m, p);
    const auto count = ahat.slice_count();

    SliceSVDSet out{DenseTensor(factor_dims(ahat.dims(), m, r)), Matrix(r, count),
                    DenseTensor(factor_dims(ahat.dims(), p, r))};

    struct Worker {
        detail::SvdWorkspace ws;
        Buffer a, vt;
    };
    for_each_slice(
        count, strategy, threads,
        [&] { return Worker{detail::SvdWorkspace(m, p, detail::SvdWorkspace::Job::thin), Buffer(m * p), Buffer(r * p)}; },
        [&](Worker& w, std::size_t i) {
            double* u = out.U.data() + i * m * r;
            double* v = out.V.data() + i * p * r;
            double* s = out.S.data() + i * r;
            if (!load_slice(ahat, i, w.a.data())) {
                std::fill(u, u + m * r, 0.0);
                std::fill(v, v + p * r, 0.0);
                std::fill(s, s + r, 0.0);
                for (std::size_t j = 0; j < r; ++j) {
                    u[j + j * m] = 1.0;
                    v[j + j * p] = 1.0;
                }
                return;
            }
            w.ws.factor(w.a.data(), s, u, w.vt.data());
            for (std::size_t j = 0; j < r; ++j)
                for (std::size_t c = 0; c < p; ++c) v[c + j * p] = w.vt[j + c * r];
        });
    return out;
}

Matrix svd_values_only(const DenseTensor& ahat, SvdStrategy strategy, int threads) {
    check_input(ahat, threads);
    const auto m = ahat.slice_rows();
    const auto p = ahat.slice_cols();
    const auto r = std::min(m, p);
    const auto count = ahat.slice_count();
    Matrix values(r, count);

    struct Worker {
        detail::SvdWorkspace ws;
        Buffer a;
    };
    for_each_slice(
        count, strategy, threads,
        [&] { return Worker{detail::SvdWorkspace(m, p, detail::SvdWorkspace::Job::values), Buffer(m * p)}; },
        [&](Worker& w, std::size_t i) {
            double* s = values.data() + i * r;
            if (!load_slice(ahat, i, w.a.data())) {
                std::fill(s, s + r, 0.0);
                return;
            }
            w.ws.factor(w.a.data(), s, nullptr, nullptr);
        });
    return values;
}

VariableRankFactors svd_truncated_slices(const DenseTensor& ahat, std::span<const std::uint32_t> ranks,
                                         SvdStrategy strategy, int threads) {
    check_input(ahat, threads);
    const auto m = ahat.slice_rows();
    const auto p = ahat.slice_cols();
    const auto r = std::min(m, p);
    const auto count = ahat.slice_count();
    check_ranks(ranks, count, r);

    auto out = allocate_factors(m, p, ranks);
    const auto u_off = out.u_offsets();
    const auto g_off = out.g_offsets();

    struct Worker {
        detail::SvdWorkspace ws;
        Buffer a, s, u, vt;
    };
    for_each_slice(
        count, strategy, threads,
        [&] {
            return Worker{detail::SvdWorkspace(m, p, detail::SvdWorkspace::Job::thin), Buffer(m * p), Buffer(r),
                          Buffer(m * r), Buffer(r * p)};
        },
        [&](Worker& w, std::size_t i) {
            const std::size_t rho = ranks[i];
            if (!load_slice(ahat, i, w.a.data())) {
                double* u = out.u.data() + u_off[i];
                for (std::size_t j = 0; j < rho; ++j) u[j + j * m] = 1.0;
                return;
            }
            if (rho == 0) {
                out.tail_energy[i] = frobenius_norm(std::span<const double>(w.a.data(), m * p));
                out.tail_energy[i] *= out.tail_energy[i];
                return;
            }
            w.ws.factor(w.a.data(), w.s.data(), w.u.data(), w.vt.data());
            pack_slice(m, p, r, rho, w.s.data(), w.u.data(), w.vt.data(), out.u.data() + u_off[i],
                       out.g.data() + g_off[i]);
            out.tail_energy[i] = tail(w.s.data(), r, rho);
        });
    return out;
}

CachedValues svd_values_cached(const DenseTensor& ahat, SvdStrategy strategy, int threads) {
    check_input(ahat, threads);
    const auto m = ahat.slice_rows();
    const auto p = ahat.slice_cols();
    const auto r = std::min(m, p);
    const auto count = ahat.slice_count();

    CachedValues out{Matrix(r, count), BidiagonalCache{m, p, std::vector<detail::BidiagonalFactors>(count)}};
    for_each_slice(
        count, strategy, threads, [&] { return detail::BidiagonalWorkspace(m, p); },
        [&](detail::BidiagonalWorkspace& ws, std::size_t i) {
            auto& f = out.cache.slices[i];
            f.reflectors.assign(m * p, 0.0);
            load_slice(ahat, i, f.reflectors.data());
            ws.reduce(f);
            ws.values(f, out.values.data() + i * r);
        });
    return out;
}

VariableRankFactors svd_truncated_from_cache(const BidiagonalCache& cache, std::span<const std::uint32_t> ranks,
                                             SvdStrategy strategy, int threads) {
    if (threads < 1) throw InvalidArgument("thread count must be at least 1");
    const auto m = cache.m;
    const auto p = cache.p;
    const auto r = std::min(m, p);
    const auto count = cache.slices.size();
    check_ranks(ranks, count, r);

    auto out = allocate_factors(m, p, ranks);
    const auto u_off = out.u_offsets();
    const auto g_off = out.g_offsets();

    struct Worker {
        detail::BidiagonalWorkspace ws;
        Buffer s, u, vt;
    };
    for_each_slice(
        count, strategy, threads,
        [&] { return Worker{detail::BidiagonalWorkspace(m, p), Buffer(r), Buffer(m * r), Buffer(r * p)}; },
        [&](Worker& w, std::size_t i) {
            const std::size_t rho = ranks[i];
            const auto& f = cache.slices[i];
            if (rho == 0) {
                w.ws.values(f, w.s.data());
                out.tail_energy[i] = tail(w.s.data(), r, 0);
                return;
            }
            w.ws.vectors(f, w.s.data(), w.u.data(), w.vt.data());
            pack_slice(m, p, r, rho, w.s.data(), w.u.data(), w.vt.data(), out.u.data() + u_off[i],
                       out.g.data() + g_off[i]);
            out.tail_energy[i] = tail(w.s.data(), r, rho);
        });
    return out;
}

}  // namespace starm
