// SPDX-License-Identifier: Apache-2.0
#pragma once

// Thin wrappers over CBLAS/LAPACK used by the kernels. Not part of the public
// API; callers outside src/ should not include this header.

#include "starm/memory.hpp"
#include "starm/tensor.hpp"

#include <cstddef>

namespace starm::detail {

/// Sets the BLAS library's internal thread count for the lifetime of the
/// scope. The setting is process-global.
class BlasThreads {
public:
    explicit BlasThreads(int threads);
    ~BlasThreads();
    BlasThreads(const BlasThreads&) = delete;
    BlasThreads& operator=(const BlasThreads&) = delete;

private:
    int previous_;
};

enum class Op { none, transpose };

/// C = alpha * op(A) * op(B) + beta * C, column-major.
void gemm(Op op_a, Op op_b, std::size_t m, std::size_t n, std::size_t k, double alpha, const double* a,
          std::size_t lda, const double* b, std::size_t ldb, double beta, double* c, std::size_t ldc);

/// Per-thread LAPACK workspace sized once for slices of a fixed shape.
/// All buffers are tracked.
class SvdWorkspace {
public:
    enum class Job { values, thin };

    SvdWorkspace(std::size_t m, std::size_t p, Job job);

    /// Factor `a` (m x p, overwritten). `s` receives min(m,p) values in
    /// descending order. For Job::thin, `u` is m x r and `vt` is r x p.
    void factor(double* a, double* s, double* u, double* vt);

private:
    std::size_t m_, p_;
    Job job_;
    Buffer work_;
};

/// Bidiagonal reduction of a slice, kept so the singular vectors can be
/// formed later without repeating the reduction.
struct BidiagonalFactors {
    Buffer reflectors;  // m x p, Householder vectors as left by dgebrd
    Buffer d, e, tauq, taup;
};

class BidiagonalWorkspace {
public:
    BidiagonalWorkspace(std::size_t m, std::size_t p);

    /// Reduce `reflectors` in place (it must hold a copy of the slice).
    void reduce(BidiagonalFactors& f);
    /// Singular values from the reduced form, descending.
    void values(const BidiagonalFactors& f, double* s);
    /// Full thin SVD from the reduced form: s (r), u (m x r), vt (r x p).
    void vectors(const BidiagonalFactors& f, double* s, double* u, double* vt);

private:
    std::size_t m_, p_, r_;
    Buffer work_;
    Buffer d_, e_;
    Buffer scratch_;
};

/// Orthonormal factor Q (m x n, m >= n) of the QR factorization of `a`.
Matrix orthonormal_columns(Matrix a);

/// All n left singular vectors of an n x c matrix (full U, completed to a
/// basis when rank-deficient), plus the singular values.
Matrix full_left_singular_vectors(Matrix a, Buffer* singular_values = nullptr);

}  // namespace starm::detail
