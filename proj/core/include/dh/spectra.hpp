#pragma once

// Spectral sweeps: butterflies, density of states, band widths, particle-hole
// pairing, the almost-Mathieu block form and the subordinacy statistic.

#include "dh/model.hpp"

#include <array>
#include <vector>

namespace dh {

/// Sorted eigenvalues of one rational alpha = p/q over a Bloch grid.
struct SpectrumSet {
    long p = 0;
    long q = 1;
    double alpha = 0.0;
    double theta = 0.0;
    std::vector<double> blochGrid;  // per-site phases in [0, 2 pi / q)
    std::vector<double> energies;   // ascending
    std::vector<int> kIndex;        // Bloch grid index of each energy
    ModelParams meta;
};

/// Reduced fractions p/q in [0, 1) with q <= qMax, ordered by (q, p).
std::vector<Fraction> farey_fractions(long qMax);

/// k_j = 2 pi j / (q * blochPoints), j = 0..blochPoints-1.
std::vector<double> bloch_grid(long q, int blochPoints);

SpectrumSet floquet_spectrum(const ModelParams& p, Fraction frac, int blochPoints);

/// One SpectrumSet per (theta, fraction), ordered by theta then (q, p).
std::vector<SpectrumSet> butterfly(const ModelParams& paramsTemplate, long qMax, int blochPoints,
                                   const std::vector<double>& thetas);

/// Per band index j: [min_k, max_k] of the j-th eigenvalue.
std::vector<std::array<double, 2>> band_intervals(const SpectrumSet& s);

/// Lebesgue measure of the union of band intervals.
double band_union_measure(const SpectrumSet& s);

struct DosEstimate {
    std::vector<double> edges;  // bins + 1
    std::vector<double> mass;   // normalised to total 1
    std::vector<long> counts;
    long totalStates = 0;
    int varthetaSamples = 0;
};

/// Eigenvalue histogram of minus-truncations [0, N-1], averaged over
/// vartheta_j = vartheta + j / varthetaSamples, on [lo, hi).
DosEstimate dos(const ModelParams& p, long N, int varthetaSamples, int bins, double lo, double hi);

/// Band-integrated histogram of the q-periodic operator, same vartheta grid
/// and bins. Oracle for dos() at rational alpha.
DosEstimate floquet_dos(const ModelParams& p, Fraction frac, int blochPoints, int varthetaSamples, int bins,
                        double lo, double hi);

struct BandWidth {
    int band = 0;
    double min = 0.0;
    double max = 0.0;
    double width() const { return max - min; }
    bool flat(double tol = 1e-6) const { return width() < tol; }
};

std::vector<BandWidth> flat_band_check(const ModelParams& p, Fraction frac, int blochPoints);

/// max_j |lambda_j + lambda_{4N+1-j}| of the minus-truncation [0, N-1].
/// Requires w0 == 0 or w1 == 0.
double particle_hole_check(const ModelParams& p, long N);

/// Scalar almost-Mathieu chain hop * (tau + tau^*) + shift + cosAmp cos(2 pi (vartheta + n alpha)).
struct AmoBlock {
    int channel = 0;     // 0..3
    double gammaSign = 0.0;  // eigenvalue of g15 on the channel
    double layerSign = 0.0;  // eigenvalue of sigma1 (x) I on the channel
    double hop = 0.0;
    double shift = 0.0;
    double cosAmp = 0.0;
    double coupling() const { return std::abs(cosAmp / (2.0 * hop)); }  // lambda = w0 / 3
};

/// (1/2) [[1,-1,-1,1],[-1,1,-1,1],[-1,-1,1,1],[1,1,1,1]]: real, symmetric,
/// orthogonal; jointly diagonalises g15 and sigma1 (x) I.
Mat4 amo_unitary();

MatX amo_block_matrix(const AmoBlock& b, const ModelParams& p, long N);

struct AmoResult {
    MatX conjugated;        // channel-major ordering
    double residual = 0.0;  // Frobenius norm of the off-block part
    std::array<AmoBlock, 4> blocks;
    double blockMismatch = 0.0;     // max entry error vs the scalar AMO blocks
    double spectrumDefect = 0.0;    // union of block spectra vs full spectrum
};

/// Requires w1 == 0, phi == 0, theta in {0, 1/2}. Window [0, N-1].
AmoResult amo_block_diagonalize(const ModelParams& p, long N);

/// Measure of the union of eigenvalues fattened by eps = spacingFactor times
/// the mean level spacing.
double fattened_measure(std::vector<double> eigenvalues, double spacingFactor = 10.0);

struct AmoScanRow {
    double w0 = 0.0;
    double measure = 0.0;
};

std::vector<AmoScanRow> amo_critical_scan(const std::vector<double>& w0List, double alpha, long N,
                                          double vartheta = 0.0);

struct SubordinacyRow {
    double energy = 0.0;
    std::array<double, 4> logStatistic{};  // r = 1..4, log of the proxy
};

/// Dirichlet (phi_0 = 0, phi_1 = I) and Neumann (psi_0 = I, psi_1 = 0)
/// matrix solutions; for each r the statistic
/// (1/L) sum_{n <= L} sigma_{5-r}^2[phi_n] + sigma_{5-r}^2[psi_n]
/// minimised over a geometric grid of L in [Lmax / 4, Lmax].
std::vector<SubordinacyRow> subordinacy_scan(const ModelParams& p, const std::vector<double>& energies, long Lmax);

}  // namespace dh
