// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace starm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes, modes, ranks, or parameters that violate an operation's contract.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A matrix offered as a transform is not orthonormal.
class NotOrthonormal : public InvalidArgument {
public:
    NotOrthonormal(const std::string& what, double residual)
        : InvalidArgument(what), residual_(residual) {}

    /// ||M^T M - I||_F / sqrt(n) of the rejected matrix.
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A frontal slice contains NaN or Inf.
class NonFiniteSlice : public Error {
public:
    explicit NonFiniteSlice(std::size_t slice)
        : Error("non-finite entry in frontal slice " + std::to_string(slice)), slice_(slice) {}

    std::size_t slice() const noexcept { return slice_; }

private:
    std::size_t slice_;
};

/// LAPACK reported a failure (e.g. the bidiagonal QR iteration did not converge).
class LapackFailure : public Error {
public:
    LapackFailure(const std::string& routine, int info)
        : Error(routine + " failed with info=" + std::to_string(info)), info_(info) {}

    int info() const noexcept { return info_; }

private:
    int info_;
};

}  // namespace starm
