#include "dh/spectra.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dh {

std::vector<Fraction> farey_fractions(long qMax) {
    if (qMax < 1) throw ConfigError("qmax", "qMax must be >= 1");
    std::vector<Fraction> out;
    for (long q = 1; q <= qMax; ++q)
        for (long p = 0; p < q; ++p)
            if (std::gcd(p, q) == 1) out.push_back({p, q});
    return out;
}

std::vector<double> bloch_grid(long q, int blochPoints) {
    if (blochPoints < 1) throw ConfigError("blochPoints", "blochPoints must be >= 1");
    std::vector<double> k(static_cast<std::size_t>(blochPoints));
    for (int j = 0; j < blochPoints; ++j) k[j] = kTwoPi * j / (static_cast<double>(q) * blochPoints);
    return k;
}

SpectrumSet floquet_spectrum(const ModelParams& p, Fraction frac, int blochPoints) {
    SpectrumSet s;
    s.p = frac.num;
    s.q = frac.den;
    s.alpha = static_cast<double>(frac.num) / static_cast<double>(frac.den);
    s.theta = p.theta;
    s.meta = p;
    s.meta.alpha = s.alpha;
    s.blochGrid = bloch_grid(frac.den, blochPoints);
    std::vector<std::pair<double, int>> all;
    all.reserve(static_cast<std::size_t>(4 * frac.den * blochPoints));
    for (int j = 0; j < blochPoints; ++j) {
        const RVecX ev = eigvalsh(build_floquet(s.meta, frac, s.blochGrid[j]).entries);
        for (Eigen::Index i = 0; i < ev.size(); ++i) all.emplace_back(ev(i), j);
    }
    std::sort(all.begin(), all.end());
    s.energies.reserve(all.size());
    s.kIndex.reserve(all.size());
    for (const auto& [e, j] : all) {
        s.energies.push_back(e);
        s.kIndex.push_back(j);
    }
    return s;
}

std::vector<SpectrumSet> butterfly(const ModelParams& paramsTemplate, long qMax, int blochPoints,
                                   const std::vector<double>& thetas) {
    if (qMax < 2) throw ConfigError("qmax", "butterfly needs qMax >= 2");
    const auto fr = farey_fractions(qMax);
    std::vector<SpectrumSet> out(fr.size() * thetas.size());
    parallel_for(out.size(), [&](std::size_t i) {
        ModelParams p = paramsTemplate;
        p.theta = thetas[i / fr.size()];
        out[i] = floquet_spectrum(p, fr[i % fr.size()], blochPoints);
    });
    return out;
}

std::vector<std::array<double, 2>> band_intervals(const SpectrumSet& s) {
    const std::size_t nk = s.blochGrid.size();
    std::vector<std::vector<double>> perK(nk);
    for (std::size_t i = 0; i < s.energies.size(); ++i) perK[static_cast<std::size_t>(s.kIndex[i])].push_back(s.energies[i]);
    const std::size_t nb = perK.empty() ? 0 : perK[0].size();
    std::vector<std::array<double, 2>> bands(nb, {std::numeric_limits<double>::infinity(),
                                                  -std::numeric_limits<double>::infinity()});
    for (const auto& ev : perK)  // already ascending: energies were sorted globally
        for (std::size_t j = 0; j < nb; ++j) {
            bands[j][0] = std::min(bands[j][0], ev[j]);
            bands[j][1] = std::max(bands[j][1], ev[j]);
        }
    return bands;
}

double band_union_measure(const SpectrumSet& s) {
    auto bands = band_intervals(s);
    std::sort(bands.begin(), bands.end());
    double total = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = lo;
    for (const auto& b : bands) {
        if (b[0] > hi) {
            if (std::isfinite(hi)) total += hi - lo;
            lo = b[0];
            hi = b[1];
        } else {
            hi = std::max(hi, b[1]);
        }
    }
    if (std::isfinite(hi)) total += hi - lo;
    return total;
}

namespace {

void check_bins(int bins, double lo, double hi) {
    if (bins < 1) throw ConfigError("bins", "bins must be >= 1");
    if (!(hi > lo)) throw ConfigError("range", "energy range must satisfy lo < hi");
}

std::vector<double> make_edges(int bins, double lo, double hi) {
    std::vector<double> e(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * i / bins;
    return e;
}

int bin_of(double e, int bins, double lo, double hi) {
    if (e < lo || e >= hi) return -1;
    const int b = static_cast<int>(std::floor((e - lo) / (hi - lo) * bins));
    return std::clamp(b, 0, bins - 1);
}

}  // namespace

DosEstimate dos(const ModelParams& p, long N, int varthetaSamples, int bins, double lo, double hi) {
    if (N < 1) throw ConfigError("N", "N must be positive");
    if (varthetaSamples < 1) throw ConfigError("varthetaSamples", "need at least one sample");
    check_bins(bins, lo, hi);
    std::vector<RVecX> spectra(static_cast<std::size_t>(varthetaSamples));
    parallel_for(spectra.size(), [&](std::size_t j) {
        ModelParams q = p;
        q.vartheta = reduce_mod1(p.vartheta + static_cast<double>(j) / varthetaSamples);
        spectra[j] = eigvalsh(build_finite(q, {0, N - 1}).entries);
    });
    DosEstimate d;
    d.edges = make_edges(bins, lo, hi);
    d.counts.assign(static_cast<std::size_t>(bins), 0);
    d.varthetaSamples = varthetaSamples;
    for (const auto& ev : spectra)
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            const int b = bin_of(ev(i), bins, lo, hi);
            if (b >= 0) ++d.counts[b];
        }
    d.totalStates = 4 * N * varthetaSamples;
    d.mass.resize(d.counts.size());
    for (std::size_t b = 0; b < d.counts.size(); ++b)
        d.mass[b] = static_cast<double>(d.counts[b]) / static_cast<double>(d.totalStates);
    return d;
}

DosEstimate floquet_dos(const ModelParams& p, Fraction frac, int blochPoints, int varthetaSamples, int bins,
                        double lo, double hi) {
    if (varthetaSamples < 1) throw ConfigError("varthetaSamples", "need at least one sample");
    check_bins(bins, lo, hi);
    const long q = frac.den;
    DosEstimate d;
    d.edges = make_edges(bins, lo, hi);
    d.counts.assign(static_cast<std::size_t>(bins), 0);
    d.varthetaSamples = varthetaSamples;
    for (int s = 0; s < varthetaSamples; ++s) {
        ModelParams m = p;
        m.alpha = static_cast<double>(frac.num) / static_cast<double>(q);
        m.vartheta = reduce_mod1(p.vartheta + static_cast<double>(s) / varthetaSamples);
        for (int j = 0; j < blochPoints; ++j) {
            const double k = kTwoPi * (j + 0.5) / (static_cast<double>(q) * blochPoints);
            const RVecX ev = eigvalsh(build_floquet(m, frac, k).entries);
            for (Eigen::Index i = 0; i < ev.size(); ++i) {
                const int b = bin_of(ev(i), bins, lo, hi);
                if (b >= 0) ++d.counts[b];
            }
        }
    }
    d.totalStates = 4 * q * blochPoints * varthetaSamples;
    d.mass.resize(d.counts.size());
    for (std::size_t b = 0; b < d.counts.size(); ++b)
        d.mass[b] = static_cast<double>(d.counts[b]) / static_cast<double>(d.totalStates);
    return d;
}

std::vector<BandWidth> flat_band_check(const ModelParams& p, Fraction frac, int blochPoints) {
    const SpectrumSet s = floquet_spectrum(p, frac, blochPoints);
    const auto bands = band_intervals(s);
    std::vector<BandWidth> out;
    out.reserve(bands.size());
    for (std::size_t j = 0; j < bands.size(); ++j) out.push_back({static_cast<int>(j), bands[j][0], bands[j][1]});
    return out;
}

double particle_hole_check(const ModelParams& p, long N) {
    if (p.w0 != 0.0 && p.w1 != 0.0)
        throw ConfigError("w", "particle-hole symmetry needs w0 == 0 or w1 == 0");
    const RVecX ev = eigvalsh(build_finite(p, {0, N - 1}).entries);
    const Eigen::Index n = ev.size();
    double defect = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) defect = std::max(defect, std::abs(ev(j) + ev(n - 1 - j)));
    return defect;
}

Mat4 amo_unitary() {
    Mat4 u;
    u << 1, -1, -1, 1,
        -1, 1, -1, 1,
        -1, -1, 1, 1,
         1, 1, 1, 1;
    return 0.5 * u;
}

MatX amo_block_matrix(const AmoBlock& b, const ModelParams& p, long N) {
    MatX h = MatX::Zero(N, N);
    for (long n = 0; n < N; ++n) {
        h(n, n) = b.shift + b.cosAmp * std::cos(kTwoPi * (p.vartheta + static_cast<double>(n) * p.alpha));
        if (n + 1 < N) h(n, n + 1) = h(n + 1, n) = b.hop;
    }
    return h;
}

AmoResult amo_block_diagonalize(const ModelParams& p, long N) {
    if (p.w1 != 0.0) throw ConfigError("w1", "almost-Mathieu form needs w1 == 0");
    if (p.phi != 0.0) throw ConfigError("phi", "almost-Mathieu form needs phi == 0");
    if (p.theta != 0.0 && p.theta != 0.5) throw ConfigError("theta", "almost-Mathieu form needs theta in {0, 1/2}");
    if (N < 1) throw ConfigError("N", "N must be positive");
    const Mat4 u = amo_unitary();
    Mat4 layer = Mat4::Zero();
    layer.block<2, 2>(0, 2) = Mat2::Identity();
    layer.block<2, 2>(2, 0) = Mat2::Identity();
    const Mat4 g = u.adjoint() * gamma::g15() * u;
    const Mat4 x = u.adjoint() * layer * u;
    const double s = std::cos(kTwoPi * p.theta);

    AmoResult r;
    for (int c = 0; c < 4; ++c) {
        AmoBlock& b = r.blocks[c];
        b.channel = c;
        b.gammaSign = g(c, c).real();
        b.layerSign = x(c, c).real();
        b.hop = b.gammaSign * s;
        b.shift = b.gammaSign + b.layerSign * p.w0 / 3.0;
        b.cosAmp = b.layerSign * 2.0 * p.w0 / 3.0;
    }

    const MatX h = build_finite(p, {0, N - 1}).entries;
    const Eigen::Index dim = 4 * N;
    // Site-wise conjugation followed by the channel-major permutation.
    MatX perm = MatX::Zero(dim, dim);
    for (long n = 0; n < N; ++n)
        for (int c = 0; c < 4; ++c)
            for (int a = 0; a < 4; ++a) perm(4 * n + a, c * N + n) = u(a, c);
    r.conjugated = perm.adjoint() * h * perm;

    double off = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            if (i / N != j / N) off += std::norm(r.conjugated(i, j));
    r.residual = std::sqrt(off);

    std::vector<double> blockEv;
    for (int c = 0; c < 4; ++c) {
        const MatX ref = amo_block_matrix(r.blocks[c], p, N);
        r.blockMismatch = std::max(r.blockMismatch, (r.conjugated.block(c * N, c * N, N, N) - ref).cwiseAbs().maxCoeff());
        const RVecX ev = eigvalsh(ref);
        blockEv.insert(blockEv.end(), ev.data(), ev.data() + ev.size());
    }
    std::sort(blockEv.begin(), blockEv.end());
    const RVecX full = eigvalsh(h);
    for (Eigen::Index i = 0; i < dim; ++i) r.spectrumDefect = std::max(r.spectrumDefect, std::abs(full(i) - blockEv[i]));
    return r;
}

double fattened_measure(std::vector<double> ev, double spacingFactor) {
    if (ev.size() < 2) return 0.0;
    std::sort(ev.begin(), ev.end());
    const double eps = spacingFactor * (ev.back() - ev.front()) / static_cast<double>(ev.size() - 1);
    double total = 0.0;
    double lo = ev[0] - eps;
    double hi = ev[0] + eps;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        if (ev[i] - eps > hi) {
            total += hi - lo;
            lo = ev[i] - eps;
        }
        hi = ev[i] + eps;
    }
    return total + (hi - lo);
}

std::vector<AmoScanRow> amo_critical_scan(const std::vector<double>& w0List, double alpha, long N, double vartheta) {
    std::vector<AmoScanRow> out(w0List.size());
    parallel_for(out.size(), [&](std::size_t i) {
        ModelParams p;
        p.w0 = w0List[i];
        p.alpha = alpha;
        p.vartheta = vartheta;
        const RVecX ev = eigvalsh(build_finite(p, {0, N - 1}).entries);
        out[i] = {w0List[i], fattened_measure(std::vector<double>(ev.data(), ev.data() + ev.size()))};
    });
    return out;
}

namespace {

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Matrix solution pair (phi_n, phi_{n-1}) with a tracked log scale.
struct ScaledSolution {
    Mat4 cur;
    Mat4 prev;
    double logScale = 0.0;

    void step(const Mat4& q) {
        const Mat4 next = q * cur - prev;
        prev = cur;
        cur = next;
        const double nrm = std::max(cur.norm(), prev.norm());
        if (nrm > 1e100) {
            cur /= nrm;
            prev /= nrm;
            logScale += std::log(nrm);
        }
    }

    std::array<double, 4> log_sigma() const {
        Eigen::JacobiSVD<Mat4> svd(cur);
        std::array<double, 4> out{};
        for (int i = 0; i < 4; ++i) {
            const double s = svd.singularValues()(i);
            out[i] = (s > 0.0 ? std::log(s) : -std::numeric_limits<double>::infinity()) + logScale;
        }
        return out;
    }
};

}  // namespace

std::vector<SubordinacyRow> subordinacy_scan(const ModelParams& p, const std::vector<double>& energies, long Lmax) {
    if (Lmax < 8) throw ConfigError("Lmax", "Lmax must be >= 8");
    // Geometric checkpoints in [Lmax / 4, Lmax].
    std::vector<long> marks;
    for (int i = 0; i <= 16; ++i) {
        const long L = static_cast<long>(std::llround(Lmax / 4.0 * std::pow(4.0, i / 16.0)));
        if (marks.empty() || marks.back() != L) marks.push_back(L);
    }
    std::vector<SubordinacyRow> out(energies.size());
    parallel_for(out.size(), [&](std::size_t idx) {
        const double e = energies[idx];
        const Mat4 t = hopping_t(p.theta);
        ScaledSolution dir{Mat4::Identity(), Mat4::Zero()};  // phi_1, phi_0
        ScaledSolution neu{Mat4::Zero(), Mat4::Identity()};  // psi_1, psi_0
        std::array<double, 4> logSum;
        logSum.fill(-std::numeric_limits<double>::infinity());
        std::array<double, 4> best;
        best.fill(std::numeric_limits<double>::infinity());
        std::size_t next = 0;
        for (long n = 1; n <= Lmax; ++n) {
            const auto sd = dir.log_sigma();
            const auto sn = neu.log_sigma();
            for (int r = 1; r <= 4; ++r) {
                const int k = 4 - r;  // sigma_{m-r+1}, zero-based and descending
                logSum[r - 1] = log_add(logSum[r - 1], log_add(2.0 * sd[k], 2.0 * sn[k]));
            }
            if (next < marks.size() && n == marks[next]) {
                for (int r = 0; r < 4; ++r) best[r] = std::min(best[r], logSum[r] - std::log(static_cast<double>(n)));
                ++next;
            }
            // Advance to n + 1 with the one-step matrix at site n.
            const Mat4 q = t * (e * Mat4::Identity() - gamma::g15() - site_potential(p, n));
            dir.step(q);
            neu.step(q);
        }
        out[idx].energy = e;
        out[idx].logStatistic = best;
    });
    return out;
}

}  // namespace dh
