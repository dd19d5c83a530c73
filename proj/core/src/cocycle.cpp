#include "dh/cocycle.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dh {

namespace {

// A block's R diagonal beyond this means the cadence is too coarse.
constexpr double kLogScaleGuard = 600.0;

Mat4 q_block(const TransferCocycle& c, double x) {
    const Mat4 t = hopping_t(c.params.theta);
    const Mat4 v = potential_block(c.params, cplx(x, c.epsilon));
    return t * (c.energy * Mat4::Identity() - gamma::g15() - v);
}

// Left-multiplies m (8 x k) by A(x) without forming A.
template <class M>
void apply_step(const Mat4& q, M& m) {
    const auto top = m.topRows(4).eval();
    m.topRows(4) = q * top - m.bottomRows(4);
    m.bottomRows(4) = top;
}

struct QRStep {
    Mat8 q;
    Mat8 r;
    std::array<double, 8> logDiag;
};

QRStep orthonormalise(const Mat8& m) {
    Eigen::HouseholderQR<Mat8> qr(m);
    QRStep out;
    out.q = qr.householderQ();
    out.r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 8; ++i) {
        const cplx d = out.r(i, i);
        const double a = std::abs(d);
        if (!(a > 0.0) || !std::isfinite(a))
            throw NumericalGuardError("cocycle iterate: degenerate QR diagonal");
        const double la = std::log(a);
        if (std::abs(la) > kLogScaleGuard)
            throw NumericalGuardError("cocycle iterate: scale factor overflow, lower reorthEvery");
        out.logDiag[i] = la;
        // Positive diagonal convention.
        const cplx ph = d / a;
        out.q.col(i) *= ph;
        out.r.row(i) *= std::conj(ph);
    }
    return out;
}

}  // namespace

Mat8 one_step(const TransferCocycle& c, double x) {
    Mat8 a = Mat8::Zero();
    a.topLeftCorner<4, 4>() = q_block(c, x);
    a.topRightCorner<4, 4>() = -Mat4::Identity();
    a.bottomLeftCorner<4, 4>() = Mat4::Identity();
    return a;
}

Mat8 symplectic_form(double theta) {
    const Mat4 t = hopping_t(theta);
    Mat8 o = Mat8::Zero();
    o.topRightCorner<4, 4>() = t;
    o.bottomLeftCorner<4, 4>() = -t;
    return o;
}

double one_step_norm_bound(const TransferCocycle& c) {
    const double amp = (1.0 + 2.0 * std::cosh(kTwoPi * c.epsilon)) / 3.0;
    return 2.0 + std::abs(c.energy) + (c.params.w0 + c.params.w1) * amp;
}

int auto_reorth_cadence(const TransferCocycle& c) {
    const double nb = one_step_norm_bound(c);
    if (nb <= 1.0) return 64;
    const int s = static_cast<int>(std::floor(std::log(1e6) / (2.0 * std::log(nb))));
    return std::clamp(s, 1, 64);
}

std::array<double, 8> IterateRecord::log_singular_values() const {
    std::array<double, 8> out{};
    if (!triangular.empty()) {
        Mat8 prod = Mat8::Identity();
        for (const auto& r : triangular) prod = r * prod;
        Eigen::JacobiSVD<Mat8> svd(prod);
        const auto& s = svd.singularValues();
        for (int i = 0; i < 8; ++i) out[i] = std::log(s(i));
        return out;
    }
    out = logDiag;
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

IterateRecord iterate(const TransferCocycle& c, double x0, long n, int reorthEvery) {
    if (n < 1) throw ConfigError("n", "iterate needs n >= 1");
    const int s = reorthEvery > 0 ? reorthEvery : auto_reorth_cadence(c);
    const bool keep = n <= 12;
    IterateRecord rec;
    rec.n = n;
    if (keep) rec.dense = Mat8::Identity();
    Mat8 m = Mat8::Identity();
    int pending = 0;
    for (long j = 0; j < n; ++j) {
        const double x = x0 + static_cast<double>(j) * c.params.alpha;
        const Mat4 q = q_block(c, x);
        apply_step(q, m);
        if (keep) apply_step(q, *rec.dense);
        if (++pending == s || j == n - 1) {
            QRStep st = orthonormalise(m);
            for (int i = 0; i < 8; ++i) rec.logDiag[i] += st.logDiag[i];
            if (keep) rec.triangular.push_back(st.r);
            m = st.q;
            pending = 0;
        }
    }
    rec.frame = m;
    return rec;
}

double LyapunovSpectrum::partial_sum(int k) const {
    double s = 0.0;
    for (int i = 0; i < std::min(k, 8); ++i) s += exponents[i];
    return s;
}

namespace {

struct PhaseRun {
    std::array<double, 8> full{};
    std::array<double, 8> firstHalf{};
    std::array<double, 8> secondHalf{};
};

PhaseRun run_phase(const TransferCocycle& c, double x0, const LyapunovOptions& opt, int s) {
    Mat8 m = Mat8::Identity();
    std::array<double, 8> acc{};
    std::array<double, 8> half{};
    const long total = opt.burnIn + opt.iterates;
    const long halfMark = opt.burnIn + opt.iterates / 2;
    int pending = 0;
    for (long j = 0; j < total; ++j) {
        const double x = x0 + static_cast<double>(j) * c.params.alpha;
        apply_step(q_block(c, x), m);
        ++pending;
        const bool boundary = (j + 1 == opt.burnIn) || (j + 1 == halfMark) || (j + 1 == total);
        if (pending == s || boundary) {
            QRStep st = orthonormalise(m);
            if (j >= opt.burnIn)
                for (int i = 0; i < 8; ++i) acc[i] += st.logDiag[i];
            m = st.q;
            pending = 0;
        }
        if (j + 1 == halfMark) half = acc;
    }
    PhaseRun out;
    const double n = static_cast<double>(opt.iterates);
    const double h1 = static_cast<double>(opt.iterates / 2);
    const double h2 = n - h1;
    for (int i = 0; i < 8; ++i) {
        out.full[i] = acc[i] / n;
        out.firstHalf[i] = half[i] / h1;
        out.secondHalf[i] = (acc[i] - half[i]) / h2;
    }
    return out;
}

LyapunovSpectrum estimate(const TransferCocycle& c, const LyapunovOptions& opt) {
    if (opt.iterates < 2) throw ConfigError("iterates", "lyapunov needs at least 2 iterates");
    if (opt.phaseSamples < 1) throw ConfigError("phaseSamples", "lyapunov needs phaseSamples >= 1");
    if (opt.burnIn < 0) throw ConfigError("burnIn", "burnIn must be non-negative");
    const int s = opt.reorthEvery > 0 ? opt.reorthEvery : auto_reorth_cadence(c);
    const int m = opt.phaseSamples;
    std::vector<PhaseRun> runs(static_cast<std::size_t>(m));
    parallel_for(runs.size(), [&](std::size_t j) {
        const double x0 = c.params.vartheta + static_cast<double>(j) / m;
        runs[j] = run_phase(c, x0, opt, s);
    });

    LyapunovSpectrum out;
    out.iterates = opt.iterates;
    out.phaseSamples = m;
    std::array<double, 8> h1{}, h2{};
    for (int i = 0; i < 8; ++i) {
        double mean = 0.0;
        for (const auto& r : runs) {
            mean += r.full[i];
            h1[i] += r.firstHalf[i];
            h2[i] += r.secondHalf[i];
        }
        mean /= m;
        h1[i] /= m;
        h2[i] /= m;
        double var = 0.0;
        for (const auto& r : runs) var += (r.full[i] - mean) * (r.full[i] - mean);
        var = m > 1 ? var / (m - 1) : 0.0;
        out.exponents[i] = mean;
        out.stderrs[i] = std::sqrt(var / m);
    }
    // Benettin ordering is asymptotic; enforce it on the averages.
    std::array<int, 8> idx{};
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return out.exponents[a] > out.exponents[b]; });
    const auto ex = out.exponents;
    const auto se = out.stderrs;
    const auto a1 = h1;
    const auto a2 = h2;
    for (int i = 0; i < 8; ++i) {
        out.exponents[i] = ex[idx[i]];
        out.stderrs[i] = se[idx[i]];
        h1[i] = a1[idx[i]];
        h2[i] = a2[idx[i]];
    }
    out.stderr = *std::max_element(out.stderrs.begin(), out.stderrs.end());
    for (int i = 0; i < 8; ++i) {
        if (std::abs(h1[i] - h2[i]) > 5.0 * out.stderrs[i] + 1e-12) out.converged = false;
    }
    return out;
}

}  // namespace

LyapunovSpectrum lyapunov(const TransferCocycle& c, const LyapunovOptions& opt) {
    return estimate(c, opt);
}

LyapunovSpectrum lyapunov_complexified(const TransferCocycle& c, const LyapunovOptions& opt) {
    if (c.epsilon == 0.0) throw ConfigError("epsilon", "complexified cocycle needs epsilon != 0");
    return estimate(c, opt);
}

double log_det_per_site(const ModelParams& p, cplx energy, long N) {
    if (N < 1) throw ConfigError("N", "N must be positive");
    const BandMatrix h = build_finite_shifted_band(p, Window{0, N - 1}, Boundary::minus, energy);
    const LogDet d = h.logdet();
    if (d.singular) return -std::numeric_limits<double>::infinity();
    return d.logAbs / static_cast<double>(N);
}

ThoulessReport thouless_check(const ModelParams& p, double energy, long N, int varthetaSamples,
                              const LyapunovOptions& opt, std::optional<double> gamma4) {
    if (N < 1) throw ConfigError("N", "N must be positive");
    if (varthetaSamples < 1) throw ConfigError("varthetaSamples", "need at least one sample");
    ThoulessReport rep;
    rep.samples = varthetaSamples;
    rep.gamma4Cocycle = gamma4 ? *gamma4 : lyapunov(TransferCocycle{p, cplx(energy, 0.0), 0.0}, opt).partial_sum(4);
    rep.perSample.assign(static_cast<std::size_t>(varthetaSamples), 0.0);
    parallel_for(rep.perSample.size(), [&](std::size_t j) {
        ModelParams q = p;
        q.vartheta = reduce_mod1(p.vartheta + (static_cast<double>(j) + 0.5) / varthetaSamples);
        rep.perSample[j] = log_det_per_site(q, cplx(energy, 0.0), N);
    });
    double sum = 0.0;
    int used = 0;
    int above = 0;
    for (double u : rep.perSample) {
        if (!std::isfinite(u)) {
            ++rep.skipped;
            continue;
        }
        sum += u;
        ++used;
        if (u >= rep.gamma4Cocycle - 0.1) ++above;
    }
    rep.gamma4Determinant = used > 0 ? sum / used : std::numeric_limits<double>::quiet_NaN();
    rep.gap = std::abs(rep.gamma4Cocycle - rep.gamma4Determinant);
    rep.lowerBoundFraction = used > 0 ? static_cast<double>(above) / used : 0.0;
    return rep;
}

std::vector<KotaniPoint> kotani_indicator(const ModelParams& p, const std::vector<double>& energies,
                                          double tauZero, const LyapunovOptions& opt) {
    if (!(tauZero > 0.0)) throw ConfigError("tauZero", "tauZero must be positive");
    std::vector<KotaniPoint> out;
    out.reserve(energies.size());
    for (double e : energies) {
        KotaniPoint pt;
        pt.energy = e;
        pt.spectrum = lyapunov(TransferCocycle{p, cplx(e, 0.0), 0.0}, opt);
        for (double g : pt.spectrum.exponents)
            if (std::abs(g) < tauZero) ++pt.zeroCount;
        out.push_back(pt);
    }
    return out;
}

}  // namespace dh
