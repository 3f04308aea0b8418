// SPDX-License-Identifier: Apache-2.0
#include "starm/detail/linalg.hpp"

#include "starm/error.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace starm::detail {

namespace {

using lint = lapack_int;

lint li(std::size_t v) { return static_cast<lint>(v); }

void check(const char* routine, lint info) {
    if (info != 0) throw LapackFailure(routine, static_cast<int>(info));
}

std::size_t query_size(double w) { return static_cast<std::size_t>(std::max(1.0, std::ceil(w))); }

}  // namespace

BlasThreads::BlasThreads(int threads) : previous_(openblas_get_num_threads()) {
    openblas_set_num_threads(std::max(1, threads));
}

BlasThreads::~BlasThreads() { openblas_set_num_threads(previous_); }

void gemm(Op op_a, Op op_b, std::size_t m, std::size_t n, std::size_t k, double alpha, const double* a,
          std::size_t lda, const double* b, std::size_t ldb, double beta, double* c, std::size_t ldc) {
    if (m == 0 || n == 0) return;
    if (k == 0) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < m; ++i) c[i + j * ldc] = beta == 0.0 ? 0.0 : beta * c[i + j * ldc];
        return;
    }
    cblas_dgemm(CblasColMajor, op_a == Op::none ? CblasNoTrans : CblasTrans,
                op_b == Op::none ? CblasNoTrans : CblasTrans, li(m), li(n), li(k), alpha, a, li(lda), b,
                li(ldb), beta, c, li(ldc));
}

SvdWorkspace::SvdWorkspace(std::size_t m, std::size_t p, Job job) : m_(m), p_(p), job_(job) {
    const auto r = std::min(m, p);
    const char jobz = job == Job::thin ? 'S' : 'N';
    double query = 0.0;
    check("dgesvd", LAPACKE_dgesvd_work(LAPACK_COL_MAJOR, jobz, jobz, li(m), li(p), nullptr, li(m), nullptr,
                                        nullptr, li(m), nullptr, li(job == Job::thin ? r : 1), &query, -1));
    work_.assign(query_size(query), 0.0);
}

void SvdWorkspace::factor(double* a, double* s, double* u, double* vt) {
    const auto r = std::min(m_, p_);
    const bool thin = job_ == Job::thin;
    const char jobz = thin ? 'S' : 'N';
    check("dgesvd", LAPACKE_dgesvd_work(LAPACK_COL_MAJOR, jobz, jobz, li(m_), li(p_), a, li(m_), s,
                                        thin ? u : nullptr, li(m_), thin ? vt : nullptr, li(thin ? r : 1),
                                        work_.data(), li(work_.size())));
}

BidiagonalWorkspace::BidiagonalWorkspace(std::size_t m, std::size_t p)
    : m_(m), p_(p), r_(std::min(m, p)), d_(r_), e_(std::max<std::size_t>(r_, 1)) {
    double q_brd = 0.0;
    check("dgebrd", LAPACKE_dgebrd_work(LAPACK_COL_MAJOR, li(m), li(p), nullptr, li(m), nullptr, nullptr, nullptr,
                                        nullptr, &q_brd, -1));
    double q_q = 0.0;
    double q_p = 0.0;
    if (m >= p) {
        check("dorgbr", LAPACKE_dorgbr_work(LAPACK_COL_MAJOR, 'Q', li(m), li(p), li(p), nullptr, li(m), nullptr,
                                            &q_q, -1));
        check("dorgbr", LAPACKE_dorgbr_work(LAPACK_COL_MAJOR, 'P', li(p), li(p), li(m), nullptr, li(p), nullptr,
                                            &q_p, -1));
    } else {
        check("dorgbr", LAPACKE_dorgbr_work(LAPACK_COL_MAJOR, 'Q', li(m), li(m), li(p), nullptr, li(m), nullptr,
                                            &q_q, -1));
        check("dorgbr", LAPACKE_dorgbr_work(LAPACK_COL_MAJOR, 'P', li(m), li(p), li(m), nullptr, li(m), nullptr,
                                            &q_p, -1));
    }
    const auto bdsqr = 4 * r_;
    work_.assign(std::max({query_size(q_brd), query_size(q_q), query_size(q_p), bdsqr}), 0.0);
}

void BidiagonalWorkspace::reduce(BidiagonalFactors& f) {
    f.d.assign(r_, 0.0);
    f.e.assign(std::max<std::size_t>(r_, 1), 0.0);
    f.tauq.assign(r_, 0.0);
    f.taup.assign(r_, 0.0);
    check("dgebrd", LAPACKE_dgebrd_work(LAPACK_COL_MAJOR, li(m_), li(p_), f.reflectors.data(), li(m_), f.d.data(),
                                        f.e.data(), f.tauq.data(), f.taup.data(), work_.data(),
                                        li(work_.size())));
}

void BidiagonalWorkspace::values(const BidiagonalFactors& f, double* s) {
    std::copy(f.d.begin(), f.d.end(), s);
    std::copy(f.e.begin(), f.e.end(), e_.begin());
    const char uplo = m_ >= p_ ? 'U' : 'L';
    check("dbdsqr", LAPACKE_dbdsqr_work(LAPACK_COL_MAJOR, uplo, li(r_), 0, 0, 0, s, e_.data(), nullptr, 1, nullptr,
                                        1, nullptr, 1, work_.data()));
}

void BidiagonalWorkspace::vectors(const BidiagonalFactors& f, double* s, double* u, double* vt) {
    const double* refl = f.reflectors.data();
    if (m_ >= p_) {
        // Q is m x p; P^T is the p x p block holding the row reflectors.
        std::copy(refl, refl + m_ * p_, u);
        check("dorgbr", LAPACKE_dorgbr_work(LAPACK_COL_MAJOR, 'Q', li(m_), li(p_), li(p_), u, li(m_), f.tauq.data(),
                                            work_.data(), li(work_.size())));
        for (std::size_t j = 0; j < p_; ++j) std::copy(refl + j * m_, refl + j * m_ + p_, vt + j * p_);
        check("dorgbr", LAPACKE_dorgbr_work(LAPACK_COL_MAJOR, 'P', li(p_), li(p_), li(m_), vt, li(p_),
                                            f.taup.data(), work_.data(), li(work_.size())));
    } else {
        std::copy(refl, refl + m_ * m_, u);
        check("dorgbr", LAPACKE_dorgbr_work(LAPACK_COL_MAJOR, 'Q', li(m_), li(m_), li(p_), u, li(m_), f.tauq.data(),
                                            work_.data(), li(work_.size())));
        std::copy(refl, refl + m_ * p_, vt);
        check("dorgbr", LAPACKE_dorgbr_work(LAPACK_COL_MAJOR, 'P', li(m_), li(p_), li(m_), vt, li(m_),
                                            f.taup.data(), work_.data(), li(work_.size())));
    }
    std::copy(f.d.begin(), f.d.end(), s);
    std::copy(f.e.begin(), f.e.end(), e_.begin());
    const char uplo = m_ >= p_ ? 'U' : 'L';
    check("dbdsqr", LAPACKE_dbdsqr_work(LAPACK_COL_MAJOR, uplo, li(r_), li(p_), li(m_), 0, s, e_.data(), vt,
                                        li(r_), u, li(m_), nullptr, 1, work_.data()));
}

Matrix orthonormal_columns(Matrix a) {
    const auto m = a.rows();
    const auto n = a.cols();
    if (m < n) throw InvalidArgument("orthonormal_columns needs rows >= cols");
    Buffer tau(std::max<std::size_t>(n, 1));
    double q1 = 0.0;
    double q2 = 0.0;
    check("dgeqrf", LAPACKE_dgeqrf_work(LAPACK_COL_MAJOR, li(m), li(n), nullptr, li(m), nullptr, &q1, -1));
    check("dorgqr", LAPACKE_dorgqr_work(LAPACK_COL_MAJOR, li(m), li(n), li(n), nullptr, li(m), nullptr, &q2, -1));
    Buffer work(std::max(query_size(q1), query_size(q2)));
    check("dgeqrf", LAPACKE_dgeqrf_work(LAPACK_COL_MAJOR, li(m), li(n), a.data(), li(m), tau.data(), work.data(),
                                        li(work.size())));
    check("dorgqr", LAPACKE_dorgqr_work(LAPACK_COL_MAJOR, li(m), li(n), li(n), a.data(), li(m), tau.data(),
                                        work.data(), li(work.size())));
    return a;
}

Matrix full_left_singular_vectors(Matrix a, Buffer* singular_values) {
    const auto n = a.rows();
    const auto c = a.cols();
    Matrix u(n, n);
    Buffer s(std::min(n, c));
    double query = 0.0;
    check("dgesvd", LAPACKE_dgesvd_work(LAPACK_COL_MAJOR, 'A', 'N', li(n), li(c), nullptr, li(n), nullptr, nullptr,
                                        li(n), nullptr, 1, &query, -1));
    Buffer work(query_size(query));
    check("dgesvd", LAPACKE_dgesvd_work(LAPACK_COL_MAJOR, 'A', 'N', li(n), li(c), a.data(), li(n), s.data(),
                                        u.data(), li(n), nullptr, 1, work.data(), li(work.size())));
    if (singular_values) *singular_values = std::move(s);
    return u;
}

}  // namespace starm::detail
