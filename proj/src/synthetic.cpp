// SPDX-License-Identifier: Apache-2.0
#include "starm/synthetic.hpp"

#include "starm/detail/linalg.hpp"
#include "starm/error.hpp"
#include "starm/transforms.hpp"
#include "starm/ttm.hpp"

#include <algorithm>
#include <cmath>

namespace starm {

std::optional<SyntheticDomain> parse_synthetic_domain(std::string_view s) {
    if (s == "identity") return SyntheticDomain::identity;
    if (s == "dct") return SyntheticDomain::dct;
    if (s == "random") return SyntheticDomain::random;
    return std::nullopt;
}

DenseTensor random_tensor(Dims dims, std::mt19937_64& rng) {
    DenseTensor t(std::move(dims));
    std::normal_distribution<double> normal;
    for (auto& v : t.values()) v = normal(rng);
    return t;
}

Matrix random_orthonormal(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Matrix a(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) a(i, j) = normal(rng);
    return detail::orthonormal_columns(std::move(a));
}

DenseTensor synthetic_tensor(const SyntheticSpec& spec) {
    if (spec.dims.size() < 3) throw InvalidArgument("synthetic tensors need order >= 3");
    if (spec.noise < 0.0) throw InvalidArgument("noise level must be non-negative");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal;

    DenseTensor hat(spec.dims);
    const auto m = hat.slice_rows();
    const auto p = hat.slice_cols();
    const auto s = std::min({spec.rank, m, p});
    Buffer a(m * s);
    Buffer b(p * s);
    for (std::size_t i = 0; i < hat.slice_count(); ++i) {
        for (auto& v : a) v = normal(rng);
        for (auto& v : b) v = normal(rng);
        auto slice = frontal_slice(hat, i);
        detail::gemm(detail::Op::none, detail::Op::transpose, m, p, s, 1.0, a.data(), m, b.data(), p, 0.0,
                     slice.data(), m);
        const double norm = frobenius_norm(std::span<const double>(slice.data(), m * p));
        const double weight = std::pow(1.0 + static_cast<double>(i), -spec.decay);
        if (norm > 0.0)
            for (std::size_t k = 0; k < m * p; ++k) slice.data()[k] *= weight / norm;
    }

    std::vector<Transform> ts;
    for (std::size_t k = 2; k < spec.dims.size(); ++k) {
        const auto n = spec.dims[k];
        switch (spec.domain) {
            case SyntheticDomain::identity: ts.push_back(identity_transform(n)); break;
            case SyntheticDomain::dct: ts.push_back(dct_matrix(n)); break;
            case SyntheticDomain::random: ts.push_back(validate(random_orthonormal(n, rng))); break;
        }
    }
    auto out = from_transform_domain(hat, TransformSet(std::move(ts)));

    if (spec.noise > 0.0) {
        DenseTensor noise = random_tensor(spec.dims, rng);
        const double scale = spec.noise * frobenius_norm(out) / frobenius_norm(noise);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * noise[k];
    }
    return out;
}

}  // namespace starm
