#pragma once

// Dirac-Harper tight-binding model: potentials, hopping matrices and the
// finite / Floquet Hamiltonian builders.

#include "dh/linalg.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <optional>

namespace dh {

/// Couplings and phases of the 1D moire Hamiltonian.
///
/// Site n sees the tunnelling potentials at phase vartheta + n * alpha;
/// the A-A' / B-B' (anti-chiral) entries are offset by -/+ phi * alpha.
struct ModelParams {
    double w0 = 0.0;        // anti-chiral coupling
    double w1 = 0.0;        // chiral coupling
    double alpha = 0.0;     // inverse moire length 1/L, in [0, 1)
    double theta = 0.0;     // transverse quasimomentum (mod 1)
    double phi = 0.0;       // A/B dislocation offset
    double vartheta = 0.0;  // phase offset (mod 1)

    /// Throws ConfigError naming the field if a value is out of range;
    /// returns a copy with theta and vartheta reduced to [0, 1).
    ModelParams validated() const;

    bool chiral_limit() const { return w0 == 0.0; }
    bool antichiral_limit() const { return w1 == 0.0; }
};

double reduce_mod1(double x);

enum class PotentialKind { U, Uc_plus, Uc_minus };

template <class T>
T potential(PotentialKind kind, T x) {
    using std::cos;
    using std::sin;
    const T c = cos(kTwoPi * x);
    switch (kind) {
        case PotentialKind::U:
            return (1.0 + 2.0 * c) / 3.0;
        case PotentialKind::Uc_plus:
            return (1.0 - c + std::sqrt(3.0) * sin(kTwoPi * x)) / 3.0;
        case PotentialKind::Uc_minus:
            return (1.0 - c - std::sqrt(3.0) * sin(kTwoPi * x)) / 3.0;
    }
    return T{};
}

namespace gamma {
Mat2 pauli(int i);  // i in {1, 2, 3}
Mat4 g15();         // diag(sigma1, sigma1)
Mat4 g25();         // diag(sigma2, sigma2)
}  // namespace gamma

/// t(theta) = cos(2 pi theta) g15 + sin(2 pi theta) g25.
Mat4 hopping_t(double theta);

/// On-site tunnelling block V_w at (possibly complex) phase x:
/// anti-chiral entries at x -/+ phi*alpha, chiral entries at x.
Mat4 potential_block(const ModelParams& p, cplx x);

/// V_w block seen by site n (phase vartheta + n alpha).
Mat4 site_potential(const ModelParams& p, long n);

/// Inclusive integer interval of sites.
struct Window {
    long n1 = 0;
    long n2 = 0;
    long size() const { return n2 - n1 + 1; }
};

enum class Boundary { minus, plus, floquet };

/// Dense Hermitian matrix assembled from 4x4 site blocks.
struct SiteBlockMatrix {
    MatX entries;
    Boundary boundary = Boundary::minus;
    Window window;
    double blochPhase = 0.0;  // only meaningful for Boundary::floquet

    Eigen::Index dim() const { return entries.rows(); }
};

/// Nearest-neighbour chain of 4x4 blocks: H(n, n) = onsite(n),
/// H(n, n+1) = hop(n), H(n+1, n) = hop(n)^H.
struct BlockChain {
    std::function<Mat4(long)> onsite;
    std::function<Mat4(long)> hop;

    /// Dense restriction to the component range [gStart, gStart + dim),
    /// where component g belongs to site floor(g / 4). Zero data outside.
    MatX restrict_components(long gStart, Eigen::Index dim) const;
    BandMatrix restrict_components_band(long gStart, Eigen::Index dim) const;

    /// Component offset of the first kept component for a window/boundary.
    static long first_component(const Window& w, Boundary b);
};

BlockChain standard_chain(const ModelParams& p);

/// P^- H P^- (Dirichlet data outside the window) or the P^+ restriction,
/// which keeps the last two components of site n1-1, all of sites
/// n1..n2-1 and the first two components of site n2.
SiteBlockMatrix build_finite(const ModelParams& p, Window w, Boundary b = Boundary::minus);

/// Banded form of build_finite(...) - E, for long windows.
BandMatrix build_finite_shifted_band(const ModelParams& p, Window w, Boundary b, cplx energy);

/// Rational alpha = num/den (lowest terms assumed after reduction).
struct Fraction {
    long num = 0;
    long den = 1;
};

/// Detects alpha = p/q with q <= maxDen within tol.
std::optional<Fraction> as_fraction(double alpha, long maxDen = 1000000, double tol = 1e-15);

/// q-site Bloch matrix with per-site quasimomentum k: the bond from site n to
/// n+1 carries t(theta) e^{ik}; sites are taken mod q. Its spectrum is
/// 2 pi / q periodic in k.
SiteBlockMatrix build_floquet(const ModelParams& p, Fraction frac, double k);

/// Plain-cosine anti-chiral variant (U(x) = cos 2 pi x, w1 ignored).
/// The flipped basis conjugates each site by diag(1, sigma1, 1).
enum class Basis { standard, layer_flipped };
BlockChain modified_chain(const ModelParams& p, Basis basis = Basis::standard);
SiteBlockMatrix build_modified(const ModelParams& p, Window w, Boundary b = Boundary::minus,
                               Basis basis = Basis::standard);

/// Per-site diag(1, sigma1, 1).
Mat4 layer_flip();

/// Particle-hole conjugators of the chiral / anti-chiral limits.
Mat4 particle_hole_conjugator_chiral();
Mat4 particle_hole_conjugator_antichiral();

}  // namespace dh
