// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "starm/error.hpp"
#include "starm/memory.hpp"
#include "starm/synthetic.hpp"
#include "starm/tsvdm.hpp"

#include <doctest.h>

#include <limits>

using namespace starm;

namespace {

constexpr Tsvdm2Strategy kStrategies[] = {Tsvdm2Strategy::truncate, Tsvdm2Strategy::compute_efficient,
                                          Tsvdm2Strategy::memory_efficient};

/// Single slice U diag(sigma) V^T with random orthonormal U, V.
DenseTensor with_values(const std::vector<double>& sigma, std::size_t m, std::size_t p, std::mt19937_64& rng) {
    const auto r = static_cast<Eigen::Index>(sigma.size());
    const Eigen::MatrixXd u = oracle::random_orthonormal(static_cast<Eigen::Index>(m), rng).leftCols(r);
    const Eigen::MatrixXd v = oracle::random_orthonormal(static_cast<Eigen::Index>(p), rng).leftCols(r);
    const Eigen::MatrixXd a = u * Eigen::Map<const Eigen::VectorXd>(sigma.data(), r).asDiagonal() * v.transpose();
    return DenseTensor({m, p, 1}, std::span<const double>(a.data(), static_cast<std::size_t>(a.size())));
}

Matrix values_matrix(std::initializer_list<std::initializer_list<double>> cols) {
    const auto r = cols.begin()->size();
    Matrix s(r, cols.size());
    std::size_t i = 0;
    for (const auto& c : cols) {
        std::size_t j = 0;
        for (double v : c) s(j++, i) = v;
        ++i;
    }
    return s;
}

/// Slice-wise products in the transform domain, built from library TTMs but
/// Eigen slice multiplication.
DenseTensor product_oracle(const DenseTensor& a, const DenseTensor& b, const std::vector<Eigen::MatrixXd>& ms) {
    const auto ah = oracle::forward(a, ms);
    const auto bh = oracle::forward(b, ms);
    Dims dims = a.dims();
    dims[1] = b.dim(1);
    DenseTensor ch(dims);
    const auto block = dims[0] * dims[1];
    for (std::size_t i = 0; i < a.slice_count(); ++i) {
        const Eigen::MatrixXd c = oracle::slice(ah, i) * oracle::slice(bh, i);
        std::copy(c.data(), c.data() + block, ch.data() + i * block);
    }
    return oracle::inverse(ch, ms);
}

std::vector<Eigen::MatrixXd> matrices(const TransformSet& ts) {
    std::vector<Eigen::MatrixXd> out;
    for (const auto& t : ts.transforms()) out.push_back(oracle::to_eigen(t.matrix()));
    return out;
}

}  // namespace

TEST_CASE("starm_product with identity transforms is facewise") {
    std::mt19937_64 rng(51);
    const auto a = oracle::random({3, 4, 5}, rng);
    DenseTensor eye({4, 4, 5});
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) eye[i * 16 + j * 5] = 1.0;
    const auto ts = TransformSet::identity(a.dims());
    CHECK(oracle::max_abs_diff(starm_product(a, eye, ts).values(), a.values()) < 1e-13);

    const auto b = oracle::random({4, 2, 5}, rng);
    const auto c = starm_product(a, b, ts);
    for (std::size_t i = 0; i < 5; ++i) {
        const Eigen::MatrixXd expect = oracle::slice(a, i) * oracle::slice(b, i);
        CHECK((oracle::slice(c, i) - expect).norm() < 1e-13 * expect.norm());
    }
}

TEST_CASE("starm_product with dct matches the three-step oracle") {
    std::mt19937_64 rng(52);
    const auto a = oracle::random({3, 4, 5}, rng);
    const auto b = oracle::random({4, 2, 5}, rng);
    const auto ts = TransformSet::dct(a.dims());
    const auto c = starm_product(a, b, ts, {2, TtmVariant::parfor, SvdStrategy::svd_parallel});
    CHECK(c.dims() == Dims{3, 2, 5});
    CHECK(oracle::relative_error(product_oracle(a, b, matrices(ts)), c) < 1e-12);

    const auto a4 = oracle::random({2, 3, 3, 2}, rng);
    const auto b4 = oracle::random({3, 2, 3, 2}, rng);
    const auto ts4 = TransformSet::data_driven(a4);
    CHECK(oracle::relative_error(product_oracle(a4, b4, matrices(ts4)), starm_product(a4, b4, ts4)) < 1e-12);

    CHECK_THROWS_AS(starm_product(a, oracle::random({3, 2, 5}, rng), ts), InvalidArgument);
    CHECK_THROWS_AS(starm_product(a, oracle::random({4, 2, 4}, rng), ts), InvalidArgument);
}

TEST_CASE("starm_product is associative") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = oracle::random({3, 4, 3, 2}, rng);
        const auto b = oracle::random({4, 2, 3, 2}, rng);
        const auto c = oracle::random({2, 5, 3, 2}, rng);
        const auto ts = trial % 2 ? TransformSet::dct(a.dims()) : TransformSet::data_driven(a);
        const auto left = starm_product(starm_product(a, b, ts), c, ts);
        const auto right = starm_product(a, starm_product(b, c, ts), ts);
        CHECK(oracle::relative_error(left, right) < 1e-11);
    }
}

TEST_CASE("full_tsvdm reconstructs") {
    std::mt19937_64 rng(54);
    const auto zero = full_tsvdm(DenseTensor({3, 2, 2}), TransformSet::dct(Dims{3, 2, 2}));
    for (double s : zero.factors.S.values()) CHECK(s == 0.0);

    const auto one = oracle::random({4, 3, 1}, rng);
    const auto f1 = full_tsvdm(one, TransformSet::identity(one.dims()));
    const auto ref = oracle::singular_values(oracle::slice(one, 0));
    for (std::size_t j = 0; j < 3; ++j) CHECK(f1.factors.S(j, 0) == doctest::Approx(ref[static_cast<Eigen::Index>(j)]));

    const auto a = oracle::random({6, 5, 4, 3}, rng);
    for (const auto& ts : {TransformSet::identity(a.dims()), TransformSet::dct(a.dims()), TransformSet::data_driven(a)}) {
        const auto f = full_tsvdm(a, ts, {3, TtmVariant::loop, SvdStrategy::slices_parallel});
        CHECK(oracle::relative_error(a, reconstruct(f)) < 1e-11);
    }
}

TEST_CASE("compute_threshold on the three-value fixture") {
    const auto s = values_matrix({{3.0, 2.0, 1.0}});
    const auto th = compute_threshold(s, 0.32);
    CHECK(th.v == std::vector<double>{1.0, 4.0, 9.0});
    CHECK(th.w == std::vector<double>{1.0, 5.0, 14.0});
    CHECK(th.J == 1);
    CHECK(th.J == oracle::max_discardable({3.0, 2.0, 1.0}, 0.32));
    CHECK(th.tau == 1.0);
    CHECK(th.ranks == Ranks{2});
    CHECK(th.discarded_energy == 1.0);
    CHECK(th.total_energy == 14.0);
}

TEST_CASE("compute_threshold edge cases") {
    const auto s = values_matrix({{3.0, 2.0, 1.0}});
    const auto tiny = compute_threshold(s, 1e-15);
    CHECK(tiny.J == 0);
    CHECK(tiny.tau == 0.0);
    CHECK(tiny.ranks == Ranks{3});

    const auto two = compute_threshold(values_matrix({{5.0, 0.1}, {0.2, 0.1}}), 0.9);
    CHECK(two.ranks == Ranks{1, 0});

    const auto zeros = compute_threshold(values_matrix({{2.0, 0.0}, {0.0, 0.0}}), 1e-15);
    // The three zero values are discardable at no cost.
    CHECK(zeros.J == 3);
    CHECK(zeros.tau == 0.0);
    CHECK(zeros.ranks == Ranks{1, 0});

    const auto all_zero = compute_threshold(Matrix(2, 3), 0.5);
    CHECK(all_zero.ranks == Ranks{0, 0, 0});
    CHECK(all_zero.total_energy == 0.0);

    CHECK_THROWS_AS(compute_threshold(s, 0.0), InvalidArgument);
    CHECK_THROWS_AS(compute_threshold(s, 1.0), InvalidArgument);
    CHECK_THROWS_AS(compute_threshold(s, 1.5), InvalidArgument);
    CHECK_THROWS_AS(compute_threshold(s, std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
}

TEST_CASE("tied values at the cutoff are kept together") {
    // Discarding one of the equal values fits the budget, discarding both
    // does not; both must be kept.
    const auto s = values_matrix({{2.0, 1.0}, {1.0, 0.0}});
    const double eps = std::sqrt(1.5 / 6.0);
    const auto th = compute_threshold(s, eps);
    CHECK(th.J == 1);
    CHECK(th.tau == 0.0);
    CHECK(th.ranks == Ranks{2, 1});
    CHECK(th.discarded_energy / th.total_energy < eps * eps);
}

TEST_CASE("compute_threshold invariants on random spectra") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = 1 + trial % 3, n = 1 + trial % 4;
        Matrix s(r, n);
        std::vector<double> flat;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> col(r);
            // Quantized values make ties common.
            for (auto& v : col) v = std::round(unif(rng) * 4.0) / 4.0;
            std::sort(col.rbegin(), col.rend());
            for (std::size_t j = 0; j < r; ++j) s(j, i) = col[j];
            flat.insert(flat.end(), col.begin(), col.end());
        }
        const double eps = 0.05 + 0.9 * unif(rng);
        const auto th = compute_threshold(s, eps);
        CHECK(std::is_sorted(th.w.begin(), th.w.end()));
        double total = 0.0;
        for (double v : flat) total += v * v;
        CHECK(th.w.back() == doctest::Approx(total).epsilon(1e-12));
        if (total > 0.0) CHECK(th.discarded_energy / total < eps * eps);
        CHECK(th.J <= oracle::max_discardable(flat, eps));
        double kept_check = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t cnt = 0;
            for (std::size_t j = 0; j < r; ++j) {
                if (s(j, i) * s(j, i) > th.tau) ++cnt;
                else kept_check += s(j, i) * s(j, i);
            }
            CHECK(th.ranks[i] == cnt);
        }
        CHECK(kept_check == doctest::Approx(th.discarded_energy).epsilon(1e-12));
    }
}

TEST_CASE("fixed rank truncation") {
    std::mt19937_64 rng(56);
    const auto a = oracle::random({5, 4, 3}, rng);
    const auto ts = TransformSet::identity(a.dims());
    const auto full = tsvdm_fixed_rank(a, ts, 4);
    CHECK(relative_error(a, reconstruct(full.tensor)) < 1e-11);
    CHECK(full.tensor.ranks == Ranks{4, 4, 4});
    CHECK(full.tensor.method == Method::tsvdm1);
    CHECK(full.tensor.parameter == 4.0);

    const auto two = tsvdm_fixed_rank(a, ts, 2);
    double expect = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto s = oracle::singular_values(oracle::slice(a, i));
        for (Eigen::Index j = 2; j < s.size(); ++j) expect += s[j] * s[j];
    }
    const auto rec = reconstruct(two.tensor);
    double err2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) err2 += (a[i] - rec[i]) * (a[i] - rec[i]);
    CHECK(err2 == doctest::Approx(expect).epsilon(1e-10));
    CHECK(two.discarded_energy == doctest::Approx(expect).epsilon(1e-10));

    CHECK_THROWS_AS(tsvdm_fixed_rank(a, ts, 0), InvalidArgument);
    CHECK_THROWS_AS(tsvdm_fixed_rank(a, ts, 5), InvalidArgument);
}

TEST_CASE("fixed rank one recovers a facewise rank-one tensor") {
    std::mt19937_64 rng(57);
    const Dims dims{4, 3, 3, 2};
    DenseTensor hat(dims);
    for (std::size_t i = 0; i < hat.slice_count(); ++i) {
        const auto u = oracle::random({4}, rng);
        const auto v = oracle::random({3}, rng);
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t r = 0; r < 4; ++r) hat[i * 12 + c * 4 + r] = u[r] * v[c];
    }
    const auto ts = TransformSet::dct(dims);
    const auto a = from_transform_domain(hat, ts);
    const auto c = tsvdm_fixed_rank(a, ts, 1, {2, TtmVariant::batched, SvdStrategy::svd_parallel});
    CHECK(relative_error(a, reconstruct(c.tensor)) < 1e-10);
}

TEST_CASE("tolerance truncation on the three-value fixture") {
    std::mt19937_64 rng(58);
    const auto a = with_values({3.0, 2.0, 1.0}, 4, 3, rng);
    for (auto strategy : kStrategies) {
        const auto c = tsvdm_tolerance(a, TransformSet::identity(a.dims()), 0.32, strategy);
        CHECK(c.tensor.ranks == Ranks{2});
        CHECK(c.tensor.method == Method::tsvdm2);
        CHECK(c.tensor.parameter == 0.32);
        const double err = relative_error(a, reconstruct(c.tensor));
        CHECK(std::abs(err - 1.0 / std::sqrt(14.0)) < 1e-12);
        CHECK(std::abs(c.relative_error() - 1.0 / std::sqrt(14.0)) < 1e-12);
    }
}

TEST_CASE("tolerance truncation keeps one dominant value near eps = 1") {
    std::mt19937_64 rng(59);
    const auto a = with_values({10.0, 0.1, 0.05}, 5, 4, rng);
    const auto c = tsvdm_tolerance(a, TransformSet::identity(a.dims()), 0.999);
    CHECK(c.tensor.ranks == Ranks{1});
    CHECK(relative_error(a, reconstruct(c.tensor)) < 0.999);
}

TEST_CASE("tiny tolerance is lossless and drops only zero values") {
    std::mt19937_64 rng(60);
    const auto a = with_values({2.0, 1.0}, 4, 3, rng);
    const auto c = tsvdm_tolerance(a, TransformSet::identity(a.dims()), 1e-14);
    CHECK(c.tensor.ranks == Ranks{2});
    CHECK(relative_error(a, reconstruct(c.tensor)) < 1e-12);
}

TEST_CASE("tolerance strategies agree and error is bracketed by the energy bound") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = oracle::random(oracle::random_dims(rng, 3 + trial % 3, 6), rng);
        const auto ts = trial % 2 ? TransformSet::dct(a.dims()) : TransformSet::data_driven(a);
        std::vector<Compression> out;
        for (auto strategy : kStrategies) out.push_back(tsvdm_tolerance(a, ts, 0.1, strategy, {2}));
        const auto base = reconstruct(out[0].tensor);
        for (const auto& c : out) {
            CHECK(c.tensor.ranks == out[0].tensor.ranks);
            CHECK(oracle::relative_error(base, reconstruct(c.tensor)) < 1e-10);
            const double err = relative_error(a, reconstruct(c.tensor));
            CHECK(err < 0.1);
            CHECK(err >= c.relative_error() - 1e-10);
            CHECK(err == doctest::Approx(c.relative_error()).epsilon(1e-8));
        }
    }
}

TEST_CASE("peak memory ordering of the tolerance strategies") {
    SyntheticSpec spec;
    spec.dims = {24, 24, 32};
    spec.rank = 1;
    spec.noise = 1e-4;
    spec.seed = 3;
    const auto a = synthetic_tensor(spec);
    const auto ts = TransformSet::dct(a.dims());
    std::size_t peak[3];
    for (int i = 0; i < 3; ++i) {
        MemoryProbe probe;
        const auto c = tsvdm_tolerance(a, ts, 0.05, kStrategies[i]);
        peak[i] = probe.peak_bytes();
        CHECK(24 * 32 >= 10 * c.tensor.rank_sum());
    }
    CHECK(peak[2] <= peak[1]);
    CHECK(peak[1] <= peak[0]);
}

TEST_CASE("all-zero input compresses to empty factors") {
    const DenseTensor a({3, 3, 2});
    const auto c = tsvdm_tolerance(a, TransformSet::dct(a.dims()), 0.5);
    CHECK(c.tensor.ranks == Ranks{0, 0});
    CHECK(c.tensor.u.empty());
    CHECK(reconstruct(c.tensor) == a);
    CHECK(compression_ratio(c.tensor) == std::numeric_limits<double>::infinity());
    CHECK(c.relative_error() == 0.0);
}

TEST_CASE("compression ratio formula") {
    std::mt19937_64 rng(62);
    const auto a = oracle::random({10, 10, 10}, rng);
    CHECK(compression_ratio(tsvdm_fixed_rank(a, TransformSet::dct(a.dims()), 10).tensor) == 0.5);
    const auto dd = tsvdm_fixed_rank(a, TransformSet::data_driven(a), 1).tensor;
    CHECK(compression_ratio(dd) == 1000.0 / (10.0 * 20.0 + 100.0));

    // Paper-scale shape, with the factors left empty so nothing is allocated.
    CompressedTensor big;
    big.dims = {73, 144, 17, 4, 365, 10};
    const std::size_t n = 17 * 4 * 365 * 10;
    big.ranks.assign(n, 1);
    big.transforms = TransformSet::dct(Dims{1, 1, 17, 4, 365, 10});
    const double expect = 73.0 * 144.0 * static_cast<double>(n) / (static_cast<double>(n) * 217.0);
    CHECK(compression_ratio(big) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("reconstruct rejects corrupt metadata") {
    std::mt19937_64 rng(63);
    const auto a = oracle::random({3, 3, 2}, rng);
    auto c = tsvdm_fixed_rank(a, TransformSet::dct(a.dims()), 2).tensor;
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.u.pop_back();
    CHECK_THROWS_AS(reconstruct(bad), InvalidArgument);
    bad = c;
    bad.ranks[0] = 4;
    CHECK_THROWS_AS(reconstruct(bad), InvalidArgument);
    bad = c;
    bad.ranks.push_back(0);
    CHECK_THROWS_AS(reconstruct(bad), InvalidArgument);
    bad = c;
    bad.ranks[1] = 1;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("tolerance argument range") {
    const DenseTensor a({2, 2, 2});
    const auto ts = TransformSet::dct(a.dims());
    CHECK_THROWS_AS(tsvdm_tolerance(a, ts, 0.0), InvalidArgument);
    CHECK_THROWS_AS(tsvdm_tolerance(a, ts, 1.0), InvalidArgument);
    CHECK_THROWS_AS(tsvdm_tolerance(a, TransformSet::dct(Dims{2, 2, 3}), 0.5), InvalidArgument);
    CHECK_THROWS_AS(full_tsvdm(DenseTensor({2, 2}), TransformSet{}), InvalidArgument);
}

TEST_CASE("strategy names round-trip") {
    for (auto s : kStrategies) CHECK(parse_tsvdm2_strategy(to_string(s)) == s);
    CHECK(parse_tsvdm2_strategy("compute-efficient") == Tsvdm2Strategy::compute_efficient);
    CHECK(parse_tsvdm2_strategy("memory-efficient") == Tsvdm2Strategy::memory_efficient);
    CHECK_FALSE(parse_tsvdm2_strategy("fast"));
}
