// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starm/tensor.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace starm {

/// Basis in which the synthetic tensor's slices are low rank.
enum class SyntheticDomain { identity, dct, random };

std::optional<SyntheticDomain> parse_synthetic_domain(std::string_view s);

/// Seeded low-multirank-plus-noise tensor: in the chosen transform domain,
/// slice i has rank `rank` and Frobenius weight (1 + i)^-decay; the result is
/// mapped back to the original domain and Gaussian noise is added with
/// ||noise||_F = noise * ||signal||_F.
struct SyntheticSpec {
    Dims dims;
    std::size_t rank = 2;
    double noise = 1e-3;
    double decay = 1.0;
    SyntheticDomain domain = SyntheticDomain::dct;
    std::uint64_t seed = 0;
};

DenseTensor synthetic_tensor(const SyntheticSpec& spec);

/// Standard normal entries.
DenseTensor random_tensor(Dims dims, std::mt19937_64& rng);

/// Haar-like random orthonormal matrix (QR of a Gaussian matrix).
Matrix random_orthonormal(std::size_t n, std::mt19937_64& rng);

}  // namespace starm
