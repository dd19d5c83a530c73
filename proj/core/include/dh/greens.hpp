#pragma once

// Green's functions of restricted Hamiltonians, Cramer minors, decay and
// regularity diagnostics, and the characteristic polynomial of the plain
// cosine model.

#include "dh/model.hpp"

#include <array>
#include <vector>

namespace dh {

/// (H^{+/-, N} - E)^{-1}. Component indices are local, 0..4N-1; the local
/// index i sits at global component gStart + i.
struct GreenBlock {
    Window window;
    Boundary boundary = Boundary::minus;
    double energy = 0.0;
    long gStart = 0;
    MatX g;

    /// 4x4 block between sites n and m (minus boundary only).
    Mat4 block(long n, long m) const;
    /// Site of a local component index.
    long site_of(Eigen::Index local) const;
};

/// Rejects energies within `minGap` of the restricted spectrum.
GreenBlock green(const ModelParams& p, Window w, Boundary b, double energy, double minGap = 1e-8);

/// Signed log-determinant of (H - E) with row a and column b removed
/// (local 0-based indices on the minus restriction).
LogDet minor_matrix(const ModelParams& p, Window w, double energy, Eigen::Index a, Eigen::Index b);

LogDet restricted_logdet(const ModelParams& p, Window w, double energy);

struct KleinFit {
    double constant = 0.0;  // max of the envelope excess over samples
    int samples = 0;
};

/// Fits C in (1/4N) log|mu_{a,b}| <= (1 - |n(a) - n(b)| / (4N)) log(w/3) + C over
/// `samples` random (vartheta, a, b), with w = w0 + w1.
KleinFit klein_fit(const ModelParams& p, double energy, long N, int samples, unsigned seed);

struct DecayProfile {
    std::vector<double> logEnvelope;  // index d = site distance, max log|G| over block pairs
    double slope = 0.0;               // least-squares slope of the envelope, per site
};

DecayProfile decay_profile(const GreenBlock& g);

struct GoodGreenReport {
    bool good = false;
    double worstMargin = 0.0;  // max over pairs of log|G| + (d - eps N) rate; good iff < 0
    DecayProfile profile;
};

/// Good iff log|G_{a,b}| < -(d - eps N) * gamma4 / 4 for all entries with
/// site distance d >= N/5 on the minus window [0, N-1] at p.vartheta.
GoodGreenReport good_green_check(const ModelParams& p, double energy, long N, double eps, double gamma4);

/// Fraction of the grid vartheta_i = i / grid with
/// (1/M) sum_{j<M} u_N(vartheta_i + j alpha) <= (1 - delta) gamma4,
/// u_N = (1/N) log|det(H_[0,N-1] - E)|.
double bad_set_measure(const ModelParams& p, double energy, long N, long M, double delta, double gamma4,
                       int grid = 256);

enum class Verdict { regular, singular };

struct RegularityReport {
    long site = 0;
    double gamma = 0.0;  // per component index
    long k = 0;
    Verdict verdict = Verdict::singular;
    Window witness;      // meaningful when regular
    int windowsTried = 0;
};

/// Spectral norm of a 4x4 block.
double block_norm(const Mat4& m);

/// Searches windows [n1, n1 + k - 1] containing n with d(I, 4n) > 4k/5 where
/// d(I, 4n) = min(|4n - 4n1|, |4n - (4n2 + 3)|), and requires
/// ||G(n, n_i)|| < exp(-gamma |4n - a_i|) for (n_i, a_i) in {(n1, 4n1), (n2, 4n2 + 3)}.
RegularityReport regularity_classify(const ModelParams& p, double energy, long n, double gamma, long k);

/// det(H - E) of the plain cosine model in the flipped basis, minus or plus
/// restriction of the window [w.n1, w.n2]. Real for real E.
double charpoly(const ModelParams& p, Window w, Boundary b, double energy);

struct CharpolyDefects {
    double evenness = 0.0;
    double halfPeriod = 0.0;
    double shift = 0.0;
    double translation = 0.0;
    double fourierHigh = 0.0;  // relative energy in harmonics |m| > 4N
    double fourierOdd = 0.0;   // relative energy in odd harmonics
    double fourierSine = 0.0;  // relative energy in sine parts (about the symmetry centre)
};

/// Identity defects for p^{N+/-}, window [0, N-1], relative to the largest
/// |p| on the grid. Requires phi = 1/4.
CharpolyDefects charpoly_symmetries(const ModelParams& p, long N, double energy, const std::vector<double>& varthetaGrid);

struct ClusterReport {
    std::vector<double> nodes;        // vartheta_j
    std::vector<double> logAbsAtNodes;
    double logLagrangeMax = 0.0;      // max_j sup_z log|l_j(z)| on [0, 1]
    double reconstructionError = 0.0; // relative, at test points
    double logUpperBound = 0.0;       // from the node values via interpolation
    double logLemmaBound = 0.0;       // 4k(L + (gamma - L/4)/5 + C) + log(2k + 1)
    double logLowerWitness = 0.0;     // max over a 256 grid of log|p|
    double witnessVartheta = 0.0;
    double lowerTarget = 0.0;         // 4k (L - eps)
    bool contradiction() const { return logLemmaBound < logLowerWitness; }
};

/// Interpolation report for two clusters starting at sites n1 < n2 with
/// window length k; L = |log(w0/3)|, gamma per component, C from klein_fit.
ClusterReport singular_cluster_bound(const ModelParams& p, double energy, long k, long n1, long n2, double gamma,
                                     double kleinC, double eps);

}  // namespace dh
