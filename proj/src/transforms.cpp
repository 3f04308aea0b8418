// SPDX-License-Identifier: Apache-2.0
#include "starm/transforms.hpp"

#include "starm/detail/linalg.hpp"
#include "starm/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace starm {

std::string_view to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::identity: return "identity";
        case TransformKind::dct: return "dct";
        case TransformKind::data_driven: return "data-driven";
        case TransformKind::custom: return "custom";
    }
    return "unknown";
}

namespace {

Matrix dct_entries(std::size_t n) {
    Matrix m(n, n);
    const double nn = static_cast<double>(n);
    const double c0 = std::sqrt(1.0 / nn);
    const double c = std::sqrt(2.0 / nn);
    for (std::size_t k = 0; k < n; ++k) {
        m(0, k) = c0;
        for (std::size_t j = 1; j < n; ++j) {
            m(j, k) = c * std::cos(std::numbers::pi * static_cast<double>((2 * k + 1) * j) / (2.0 * nn));
        }
    }
    return m;
}

}  // namespace

double orthonormality_residual(const Matrix& m) {
    const auto n = m.rows();
    if (n == 0 || m.cols() != n) throw InvalidArgument("transform matrix must be square and non-empty");
    Matrix gram(n, n);
    detail::gemm(detail::Op::transpose, detail::Op::none, n, n, n, 1.0, m.data(), n, m.data(), n, 0.0,
                 gram.data(), n);
    for (std::size_t i = 0; i < n; ++i) gram(i, i) -= 1.0;
    return frobenius_norm(gram) / std::sqrt(static_cast<double>(n));
}

Transform Transform::from_matrix(Matrix m, TransformKind kind) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InvalidArgument("transform matrix must be square and non-empty, got " + std::to_string(m.rows()) +
                              "x" + std::to_string(m.cols()));
    }
    if (kind == TransformKind::identity && m != Matrix::identity(m.rows())) {
        throw InvalidArgument("identity transform must be exactly the identity matrix");
    }
    if (kind == TransformKind::dct) {
        const auto ref = dct_entries(m.rows());
        for (std::size_t i = 0; i < m.values().size(); ++i) {
            if (std::abs(m.values()[i] - ref.values()[i]) > 1e-13) {
                throw InvalidArgument("dct transform does not match the DCT-II matrix");
            }
        }
    }
    const double residual = orthonormality_residual(m);
    if (!(residual <= kOrthonormalityTolerance)) {
        std::ostringstream msg;
        msg << "transform is not orthonormal: ||M^T M - I||_F / sqrt(n) = " << residual;
        throw NotOrthonormal(msg.str(), residual);
    }
    return Transform(std::move(m), kind);
}

Transform dct_matrix(std::size_t n) {
    if (n == 0) throw InvalidArgument("DCT size must be positive");
    return Transform::from_matrix(dct_entries(n), TransformKind::dct);
}

Transform identity_transform(std::size_t n) {
    if (n == 0) throw InvalidArgument("transform size must be positive");
    return Transform(Matrix::identity(n), TransformKind::identity);
}

Transform data_driven_transform(const DenseTensor& t, std::size_t mode) {
    if (mode < 3 || mode > t.order()) throw InvalidArgument("data-driven transform needs a mode k >= 3");
    if (frobenius_norm(t) == 0.0) throw InvalidArgument("data-driven transform is undefined for an all-zero tensor");
    Matrix u = detail::full_left_singular_vectors(unfold(t, mode));
    const auto n = u.rows();
    Matrix m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) m(i, j) = u(j, i);
    return Transform::from_matrix(std::move(m), TransformKind::data_driven);
}

Transform validate(Matrix m) { return Transform::from_matrix(std::move(m), TransformKind::custom); }

const Transform& TransformSet::for_mode(std::size_t mode) const {
    if (mode < 3 || mode - 3 >= transforms_.size()) {
        throw InvalidArgument("no transform for mode " + std::to_string(mode));
    }
    return transforms_[mode - 3];
}

void TransformSet::check_matches(const Dims& dims) const {
    const std::size_t trailing = dims.size() > 2 ? dims.size() - 2 : 0;
    if (transforms_.size() != trailing) {
        throw InvalidArgument("expected " + std::to_string(trailing) + " transforms, got " +
                              std::to_string(transforms_.size()));
    }
    for (std::size_t k = 0; k < trailing; ++k) {
        if (transforms_[k].size() != dims[k + 2]) {
            throw InvalidArgument("transform for mode " + std::to_string(k + 3) + " has size " +
                                  std::to_string(transforms_[k].size()) + ", expected " +
                                  std::to_string(dims[k + 2]));
        }
    }
}

TransformSet TransformSet::identity(const Dims& dims) {
    std::vector<Transform> ts;
    for (std::size_t k = 2; k < dims.size(); ++k) ts.push_back(identity_transform(dims[k]));
    return TransformSet(std::move(ts));
}

TransformSet TransformSet::dct(const Dims& dims) {
    std::vector<Transform> ts;
    for (std::size_t k = 2; k < dims.size(); ++k) ts.push_back(dct_matrix(dims[k]));
    return TransformSet(std::move(ts));
}

TransformSet TransformSet::data_driven(const DenseTensor& t) {
    std::vector<Transform> ts;
    for (std::size_t k = 3; k <= t.order(); ++k) ts.push_back(data_driven_transform(t, k));
    return TransformSet(std::move(ts));
}

}  // namespace starm
