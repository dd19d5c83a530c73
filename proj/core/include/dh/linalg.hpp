#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dh {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Mat8 = Eigen::Matrix<cplx, 8, 8>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;
using Vec8 = Eigen::Matrix<cplx, 8, 1>;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;
using RVecX = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Invalid input: a precondition on a parameter failed. `field()` names the
/// offending parameter so front-ends can report it.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A numerical guard tripped (boundary contamination, overflow, a
/// near-singular resolvent, non-convergence of an integrator).
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Determinant kept as log|det| plus a unit phase so that products of
/// thousands of factors never overflow.
struct LogDet {
    double logAbs = 0.0;
    cplx phase{1.0, 0.0};
    bool singular = false;

    cplx value() const { return singular ? cplx{0.0, 0.0} : phase * std::exp(logAbs); }
};

struct HermitianEigen {
    RVecX values;  // ascending
    MatX vectors;  // columns, empty when only values were requested
};

/// Dense Hermitian eigensolve (LAPACK zheevr). Only the lower triangle is read.
HermitianEigen eigh(const MatX& m, bool wantVectors = true);
RVecX eigvalsh(const MatX& m);

/// Dense log-determinant through LU with partial pivoting.
LogDet logdet(const MatX& m);

/// Square banded matrix with kl sub- and ku super-diagonals, stored in the
/// LAPACK band layout with kl extra rows reserved for LU fill-in.
class BandMatrix {
public:
    BandMatrix(Eigen::Index n, int kl, int ku);

    Eigen::Index size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    bool in_band(Eigen::Index i, Eigen::Index j) const {
        return j - i <= ku_ && i - j <= kl_;
    }
    cplx& operator()(Eigen::Index i, Eigen::Index j);
    cplx operator()(Eigen::Index i, Eigen::Index j) const;

    MatX to_dense() const;

    /// log|det| and phase by banded LU with partial pivoting;
    /// O(n * kl * (kl + ku)).
    LogDet logdet() const;

private:
    Eigen::Index n_;
    int kl_;
    int ku_;
    int ldab_;
    std::vector<cplx> ab_;
};

/// Relative Frobenius Hermiticity defect ||M - M^H|| / ||M||.
double hermiticity_defect(const MatX& m);

/// Worker count: DH_WORKERS if set, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
/// is processed exactly once; callers write into preallocated slots so the
/// result order does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dh
