#include "dh/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace dh {

namespace {

lapack_complex_double* as_lapack(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

LogDet logdet_from_lu(const cplx* diag, std::ptrdiff_t stride, lapack_int n, const lapack_int* ipiv) {
    LogDet out;
    int swaps = 0;
    for (lapack_int i = 0; i < n; ++i) {
        const cplx d = diag[i * stride];
        const double a = std::abs(d);
        if (a == 0.0) {
            out.singular = true;
            out.logAbs = -std::numeric_limits<double>::infinity();
            out.phase = {0.0, 0.0};
            return out;
        }
        out.logAbs += std::log(a);
        out.phase *= d / a;
        if (ipiv[i] != i + 1) ++swaps;
    }
    // Renormalise the accumulated phase against drift.
    out.phase /= std::abs(out.phase);
    if (swaps % 2 == 1) out.phase = -out.phase;
    return out;
}

}  // namespace

HermitianEigen eigh(const MatX& m, bool wantVectors) {
    if (m.rows() != m.cols()) throw ConfigError("matrix", "eigh: matrix must be square");
    HermitianEigen out;
    const lapack_int n = static_cast<lapack_int>(m.rows());
    out.values.resize(n);
    if (n == 0) return out;
    MatX a = m;
    // zheevr rather than zheevd: the divide-and-conquer eigenvectors of the
    // OpenBLAS 0.3.20 build are wrong beyond a few hundred rows.
    MatX z;
    if (wantVectors) z.resize(n, n);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_zheevr(LAPACK_COL_MAJOR, wantVectors ? 'V' : 'N', 'A', 'L', n, as_lapack(a.data()), n, 0.0, 0.0, 0,
                       0, 0.0, &found, out.values.data(), wantVectors ? as_lapack(z.data()) : nullptr, n,
                       support.data());
    if (info != 0 || found != n) throw NumericalGuardError("zheevr failed with info=" + std::to_string(info));
    if (wantVectors) out.vectors = std::move(z);
    return out;
}

RVecX eigvalsh(const MatX& m) { return eigh(m, false).values; }

LogDet logdet(const MatX& m) {
    if (m.rows() != m.cols()) throw ConfigError("matrix", "logdet: matrix must be square");
    const lapack_int n = static_cast<lapack_int>(m.rows());
    if (n == 0) return {};
    MatX a = m;
    std::vector<lapack_int> ipiv(n);
    const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, as_lapack(a.data()), n, ipiv.data());
    if (info < 0) throw NumericalGuardError("zgetrf failed with info=" + std::to_string(info));
    return logdet_from_lu(a.data(), n + 1, n, ipiv.data());
}

BandMatrix::BandMatrix(Eigen::Index n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(ldab_) * static_cast<std::size_t>(n), cplx{0.0, 0.0}) {
    if (n < 1 || kl < 0 || ku < 0) throw ConfigError("band", "BandMatrix: invalid shape");
}

cplx& BandMatrix::operator()(Eigen::Index i, Eigen::Index j) {
    if (!in_band(i, j)) throw std::out_of_range("BandMatrix: entry outside band");
    return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

cplx BandMatrix::operator()(Eigen::Index i, Eigen::Index j) const {
    if (!in_band(i, j)) return {0.0, 0.0};
    return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

MatX BandMatrix::to_dense() const {
    MatX d = MatX::Zero(n_, n_);
    for (Eigen::Index j = 0; j < n_; ++j)
        for (Eigen::Index i = std::max<Eigen::Index>(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i)
            d(i, j) = (*this)(i, j);
    return d;
}

LogDet BandMatrix::logdet() const {
    std::vector<cplx> work = ab_;
    const lapack_int n = static_cast<lapack_int>(n_);
    std::vector<lapack_int> ipiv(n);
    const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl_, ku_, as_lapack(work.data()), ldab_,
                                           ipiv.data());
    if (info < 0) throw NumericalGuardError("zgbtrf failed with info=" + std::to_string(info));
    // U's diagonal sits in band row kl + ku.
    return logdet_from_lu(work.data() + (kl_ + ku_), ldab_, n, ipiv.data());
}

double hermiticity_defect(const MatX& m) {
    const double norm = m.norm();
    if (norm == 0.0) return 0.0;
    return (m - m.adjoint()).norm() / norm;
}

unsigned worker_count() {
    if (const char* env = std::getenv("DH_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failureMutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failureMutex);
                    if (!failure) failure = std::current_exception();
                    next.store(n);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace dh
