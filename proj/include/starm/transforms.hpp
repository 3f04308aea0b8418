// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starm/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace starm {

enum class TransformKind : std::uint8_t { identity = 0, dct = 1, data_driven = 2, custom = 3 };

std::string_view to_string(TransformKind kind);

/// Whether a transform of this kind must be stored alongside compressed data
/// (it cannot be regenerated from its size alone).
constexpr bool is_stored(TransformKind kind) {
    return kind == TransformKind::data_driven || kind == TransformKind::custom;
}

/// Largest accepted ||M^T M - I||_F / sqrt(n).
inline constexpr double kOrthonormalityTolerance = 1e-10;

/// An n x n orthonormal matrix M applied along one trailing mode. The inverse
/// is M^T.
class Transform {
public:
    std::size_t size() const noexcept { return matrix_.rows(); }
    TransformKind kind() const noexcept { return kind_; }
    const Matrix& matrix() const noexcept { return matrix_; }

    /// Wraps a matrix after checking orthonormality. Throws NotOrthonormal.
    static Transform from_matrix(Matrix m, TransformKind kind);

    friend bool operator==(const Transform&, const Transform&) = default;

private:
    Transform(Matrix m, TransformKind kind) : matrix_(std::move(m)), kind_(kind) {}

    Matrix matrix_;
    TransformKind kind_ = TransformKind::identity;

    friend Transform identity_transform(std::size_t n);
};

/// ||M^T M - I||_F / sqrt(n).
double orthonormality_residual(const Matrix& m);

/// Orthonormal DCT-II: M[j,k] = c_j cos(pi (2k+1) j / (2n)).
Transform dct_matrix(std::size_t n);

Transform identity_transform(std::size_t n);

/// M = U^T where U holds the left singular vectors of the mode-k unfolding.
/// Throws for an all-zero tensor.
Transform data_driven_transform(const DenseTensor& t, std::size_t mode);

/// Accepts a user-supplied square orthonormal matrix as a custom transform.
Transform validate(Matrix m);

/// One transform per mode 3..d.
class TransformSet {
public:
    TransformSet() = default;
    explicit TransformSet(std::vector<Transform> transforms) : transforms_(std::move(transforms)) {}

    /// Transform for 1-based mode k >= 3.
    const Transform& for_mode(std::size_t mode) const;

    std::size_t size() const noexcept { return transforms_.size(); }
    const std::vector<Transform>& transforms() const noexcept { return transforms_; }

    /// Throws unless there is one transform per trailing mode with matching size.
    void check_matches(const Dims& dims) const;

    static TransformSet identity(const Dims& dims);
    static TransformSet dct(const Dims& dims);
    /// Independent data-driven transform for every mode k >= 3.
    static TransformSet data_driven(const DenseTensor& t);

    friend bool operator==(const TransformSet&, const TransformSet&) = default;

private:
    std::vector<Transform> transforms_;
};

}  // namespace starm
