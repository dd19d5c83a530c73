#pragma once

// 8x8 Schroedinger cocycle of the moire Hamiltonian and Lyapunov exponents.

#include "dh/model.hpp"

#include <array>
#include <optional>
#include <vector>

namespace dh {

/// A(x) = [[Q(x + i eps), -I], [I, 0]] with Q = t(theta)(E - t0 - V_w).
/// Maps (psi_n, psi_{n-1}) to (psi_{n+1}, psi_n) for site phase x.
struct TransferCocycle {
    ModelParams params;
    cplx energy{0.0, 0.0};
    double epsilon = 0.0;  // imaginary shift of the phase
};

Mat8 one_step(const TransferCocycle& c, double x);

/// Omega = [[0, t], [-t, 0]]; A^H Omega A = Omega for real E, eps = 0.
Mat8 symplectic_form(double theta);

/// Upper bound on ||A(x)|| over real x, used to pick the QR cadence.
double one_step_norm_bound(const TransferCocycle& c);

/// Steps between re-orthogonalisations such that the condition growth of a
/// block stays below 1e6 (at least 1).
int auto_reorth_cadence(const TransferCocycle& c);

/// A_n(x0) = A(x0 + (n-1) alpha) ... A(x0) held as Q * R_m ... R_1.
struct IterateRecord {
    long n = 0;
    std::array<double, 8> logDiag{};  // sum of log|R_ii| over all blocks
    Mat8 frame = Mat8::Identity();    // current orthonormal factor Q
    std::optional<Mat8> dense;        // plain product, kept for n <= 12
    std::vector<Mat8> triangular;     // R factors, kept for n <= 12

    /// Descending log singular values of A_n. Exact (via the stored
    /// factors) for n <= 12, otherwise the sorted QR estimates.
    std::array<double, 8> log_singular_values() const;
};

/// reorthEvery <= 0 selects auto_reorth_cadence.
IterateRecord iterate(const TransferCocycle& c, double x0, long n, int reorthEvery = 0);

struct LyapunovOptions {
    long iterates = 100000;
    int phaseSamples = 16;
    int reorthEvery = 0;  // 0: auto
    long burnIn = 1000;
};

struct LyapunovSpectrum {
    std::array<double, 8> exponents{};  // nonincreasing
    std::array<double, 8> stderrs{};    // per exponent
    double stderr = 0.0;                // max over exponents
    long iterates = 0;
    int phaseSamples = 0;
    bool converged = true;  // halves agree within 5 stderr

    /// gamma^k = gamma_1 + ... + gamma_k.
    double partial_sum(int k) const;
};

/// Average over the phase grid x_j = vartheta + j / phaseSamples.
LyapunovSpectrum lyapunov(const TransferCocycle& c, const LyapunovOptions& opt = {});

/// Same estimator; requires epsilon != 0.
LyapunovSpectrum lyapunov_complexified(const TransferCocycle& c, const LyapunovOptions& opt = {});

/// (1/N) log|det(H_[0,N-1](vartheta) - E)| through banded LU.
double log_det_per_site(const ModelParams& p, cplx energy, long N);

struct ThoulessReport {
    double gamma4Cocycle = 0.0;
    double gamma4Determinant = 0.0;
    double gap = 0.0;
    double lowerBoundFraction = 0.0;  // share of samples with u_N >= gamma4 - 0.1
    int skipped = 0;                  // singular samples
    int samples = 0;
    std::vector<double> perSample;    // u_N per vartheta sample
};

/// vartheta samples are (j + 1/2) / varthetaSamples. gamma4 is estimated
/// with `opt` unless supplied.
ThoulessReport thouless_check(const ModelParams& p, double energy, long N, int varthetaSamples,
                              const LyapunovOptions& opt = {}, std::optional<double> gamma4 = std::nullopt);

struct KotaniPoint {
    double energy = 0.0;
    int zeroCount = 0;
    LyapunovSpectrum spectrum;
};

std::vector<KotaniPoint> kotani_indicator(const ModelParams& p, const std::vector<double>& energies,
                                          double tauZero = 1e-2, const LyapunovOptions& opt = {});

}  // namespace dh
