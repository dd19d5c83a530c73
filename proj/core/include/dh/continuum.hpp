#pragma once

// Low-energy continuum model L(k_x) on L-periodic functions: Fourier-mode
// Bloch matrices, the anti-chiral closed-form solutions and the chiral
// monodromy matrix.

#include "dh/linalg.hpp"

#include <array>
#include <vector>

namespace dh {

struct ContinuumParams {
    double w0 = 0.0;
    double w1 = 0.0;
    double L = 1.0;
    double kPerp = 0.0;
    double kx = 0.0;
    int nModes = 64;  // Fourier modes -nModes..nModes

    /// Throws ConfigError naming the field.
    ContinuumParams validated() const;
    Eigen::Index dim() const { return 4 * (2 * static_cast<Eigen::Index>(nModes) + 1); }
};

/// Basis index of Fourier mode m (|m| <= nModes) and component c (0..3).
inline Eigen::Index mode_index(const ContinuumParams& p, int m, int c) {
    return 4 * static_cast<Eigen::Index>(m + p.nModes) + c;
}

/// L(k_x) truncated to modes -nModes..nModes. D_x = -i d/dx acts as
/// 2 pi m / L + k_x; U and U_c^+- couple modes m and m +- 1 only.
MatX bloch_matrix(const ContinuumParams& p);

/// The displayed transformed operator Lhat_lambda(0) at the same truncation.
/// It is obtained from L(0) - lambda by reordering rows (2, 4, 1, 3) and
/// columns (1, 3, 2, 4), and Lhat_lambda(k_x) = Lhat_lambda(0) + k_x.
MatX transformed_matrix(const ContinuumParams& p, double lambda);

struct BranchWidths {
    std::vector<double> kx;
    std::vector<RVecX> energies;  // sorted spectrum per k_x
    RVecX widths;                 // max - min of each sorted-index curve
    int flatCount = 0;            // widths below flatTol
    int nearCrossings = 0;        // adjacent sorted levels closer than 1e-8
    double flatTol = 1e-6;
};

/// Sorted-index branch curves over kxGrid. Widths on sorted curves
/// lower-bound true branch widths when branches cross.
BranchWidths flat_band_scan_continuum(const ContinuumParams& p, const std::vector<double>& kxGrid, double kPerp);

/// kxGrid of n points covering [0, 2 pi / L].
std::vector<double> brillouin_grid(double L, int n);

struct AntichiralSolution {
    double lambda = 0.0, kx = 0.0, w0 = 0.0, L = 1.0;
    std::vector<double> x;
    std::vector<Mat4> fundamental;  // exp(-B(lambda, x)); column j starts at e_j
    double diagonalDefect = 0.0;    // max off-diagonal of U B U^* over the grid
    double quantizationDefect = 0.0;
    double odeResidual = 0.0;       // max |D_x phi + A phi| by 8th-order differences

    /// Solution from phi0 = e_j at grid point i.
    Vec4 column(std::size_t i, int j) const { return fundamental[i].col(j); }
};

/// The Hadamard-type unitary that diagonalises B(lambda, x).
Mat4 antichiral_unitary();

/// A(lambda, x) and B(lambda, x) with W normalised so that D_x W = U:
/// W(x/L) = (i/3)(x + (L/pi) sin(2 pi x / L)).
Mat4 antichiral_A(double lambda, double kx, double w0, double L, double x);
Mat4 antichiral_B(double lambda, double kx, double w0, double L, double x);

/// min over sign pairs of dist((k_x + s lambda + s' w0/3) L, 2 pi Z).
double antichiral_quantization_defect(double lambda, double kx, double w0, double L);

/// phi(x) = exp(-B(lambda, x)) phi0 on gridPoints + 1 points of [0, L].
AntichiralSolution antichiral_closed_form(double lambda, double kx, double w0, double L, int gridPoints = 256);

struct MonodromyResult {
    Mat2 matrix;  // M = X(1)
    double w1 = 0.0;
    double h = 0.0;
    double detDefect = 0.0;  // |det M - 1|
    cplx trace;
    double halvingError = 0.0;  // max entry change when h is halved
};

/// 2x2 off-diagonal (U_c^+, U_c^-) matrix at x.
Mat2 chiral_coupling(double x);

/// Integrates D_x X + w1 U(x) X = 0, X(0) = I over [0, 1] by classical RK4
/// with 1/steps and 1/(2 steps). Throws NumericalGuardError when the two
/// differ by more than 1e-8.
MonodromyResult chiral_monodromy(double w1, int steps = 4096);

/// (M(w1) - M(-w1)) / (2 w1): first-order coefficient X_1(1) up to O(w1^2).
Mat2 monodromy_odd_part(double w1, int steps = 4096);

struct TraceExpansion {
    std::vector<double> couplings;
    std::vector<double> ratios;  // (tr M - 2) / w1^2
    double richardson = 0.0;     // w1 -> 0 limit, error O(w1^4)
};

/// Richardson extrapolation in w1^2 over a halving sequence of couplings.
TraceExpansion trace_expansion(const std::vector<double>& couplings, int steps = 4096);

struct ZeroEnergyReport {
    bool inSpectrumGlobally = false;  // some eigenvalue rho != 0 of M
    bool excludedAtKxZero = false;    // |tr M - 2| beyond 10 x integration error
    bool realQuasimomentum = false;   // some rho on the unit circle, so mu is real
    std::array<cplx, 2> rho;
    std::array<cplx, 2> mu;  // psi = exp(i mu x) X(x) v is periodic: exp(i mu) rho = 1
    double traceDefect = 0.0;
    double integrationError = 0.0;
};

ZeroEnergyReport zero_energy_chiral(double w1, const std::vector<int>& stepsGrid = {1024, 2048, 4096});

}  // namespace dh
