#pragma once

// Wavepacket evolution on finite minus-truncations, transport moments and
// the dynamical-localisation functional.

#include "dh/model.hpp"

#include <array>
#include <vector>

namespace dh {

struct WavepacketState {
    Window window;
    VecX amplitudes;  // 4 components per site, site-major
    double time = 0.0;

    long site(Eigen::Index i) const { return window.n1 + static_cast<long>(i) / 4; }
    double norm() const { return amplitudes.norm(); }
};

/// exp(-(n - center)^2 / (2 sigma^2)) on one internal component (1..4),
/// normalised. The window must contain center +/- 6 sigma.
WavepacketState gaussian_packet(double sigma, long center, int component, Window window);

/// Unit vector on one site and component.
WavepacketState site_packet(long center, int component, Window window);

/// Eigendecomposition of the minus-truncation, reused for every time.
class Propagator {
public:
    Propagator(const ModelParams& p, Window window);

    const Window& window() const { return window_; }
    const HermitianEigen& eigen() const { return eig_; }

    /// psi(t) = sum_j exp(-i lambda_j t) <v_j, psi0> v_j. Throws
    /// NumericalGuardError naming the time when the mass on the outermost
    /// guardSites sites exceeds guardMass.
    std::vector<WavepacketState> evolve(const WavepacketState& psi0, const std::vector<double>& times) const;

    double energy(const WavepacketState& psi) const;

    int guardSites = 10;
    double guardMass = 1e-8;

private:
    Window window_;
    HermitianEigen eig_;
};

std::vector<WavepacketState> evolve(const ModelParams& p, const WavepacketState& psi0, const std::vector<double>& times);

/// Mass on the outermost `sites` sites at either end.
double boundary_mass(const WavepacketState& psi, int sites);

/// sum_n n^2 |psi(n)|^2 and sqrt(sum_n (1 + n^2) |psi(n)|^2).
double second_moment(const WavepacketState& psi);
double weighted_moment(const WavepacketState& psi);

/// 1 / sum_n (sum_c |psi(n, c)|^2)^2, in sites.
double participation_ratio(const WavepacketState& psi);

struct DynlocResult {
    double supremum = 0.0;
    std::vector<double> times;
    std::vector<double> moments;
};

/// Supremum of weighted_moment over the sampled times (grid proxy).
DynlocResult dynloc_moment(const ModelParams& p, const WavepacketState& psi0, const std::vector<double>& timeGrid);

/// Per state: sum_n |psi(n, c)|^2 for c = 1..4.
std::vector<std::array<double, 4>> layer_trace(const std::vector<WavepacketState>& states);

/// Geometric grid from t0 to t1 with perDecade points per decade (both ends
/// included), preceded by t = 0 when includeZero.
std::vector<double> geometric_time_grid(double t0, double t1, int perDecade = 64, bool includeZero = false);

}  // namespace dh
