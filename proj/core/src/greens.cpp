#include "dh/greens.hpp"

#include "dh/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace dh {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

long floor4(long g) {
    return g >= 0 ? g / 4 : -((-g + 3) / 4);
}

MatX shifted(const MatX& h, double energy) {
    MatX m = h;
    m.diagonal().array() -= energy;
    return m;
}

ModelParams at_phase(const ModelParams& p, double vartheta) {
    ModelParams q = p;
    q.vartheta = vartheta;
    return q;
}

}  // namespace

double block_norm(const Mat4& m) {
    return Eigen::JacobiSVD<Mat4>(m).singularValues()(0);
}

long GreenBlock::site_of(Eigen::Index local) const {
    return floor4(gStart + static_cast<long>(local));
}

Mat4 GreenBlock::block(long n, long m) const {
    if (boundary != Boundary::minus) throw ConfigError("boundary", "site blocks are defined on minus windows");
    if (n < window.n1 || n > window.n2 || m < window.n1 || m > window.n2)
        throw ConfigError("window", "site outside the window");
    return g.block<4, 4>(4 * (n - window.n1), 4 * (m - window.n1));
}

GreenBlock green(const ModelParams& p, Window w, Boundary b, double energy, double minGap) {
    const SiteBlockMatrix h = build_finite(p, w, b);
    const RVecX ev = eigvalsh(h.entries);
    Eigen::Index closest = 0;
    (ev.array() - energy).abs().minCoeff(&closest);
    if (std::abs(ev(closest) - energy) < minGap) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "energy " << energy << " is within " << minGap << " of the eigenvalue " << ev(closest);
        throw NumericalGuardError(msg.str());
    }
    GreenBlock out;
    out.window = w;
    out.boundary = b;
    out.energy = energy;
    out.gStart = BlockChain::first_component(w, b);
    out.g = shifted(h.entries, energy).partialPivLu().inverse();
    return out;
}

LogDet restricted_logdet(const ModelParams& p, Window w, double energy) {
    return logdet(shifted(build_finite(p, w, Boundary::minus).entries, energy));
}

LogDet minor_matrix(const ModelParams& p, Window w, double energy, Eigen::Index a, Eigen::Index b) {
    const MatX m = shifted(build_finite(p, w, Boundary::minus).entries, energy);
    const Eigen::Index n = m.rows();
    if (a < 0 || a >= n) throw ConfigError("alpha", "minor row index outside the window");
    if (b < 0 || b >= n) throw ConfigError("alpha_prime", "minor column index outside the window");
    if (n == 1) return LogDet{};
    MatX d(n - 1, n - 1);
    for (Eigen::Index i = 0, r = 0; i < n; ++i) {
        if (i == a) continue;
        for (Eigen::Index j = 0, c = 0; j < n; ++j) {
            if (j == b) continue;
            d(r, c++) = m(i, j);
        }
        ++r;
    }
    return logdet(d);
}

KleinFit klein_fit(const ModelParams& p, double energy, long N, int samples, unsigned seed) {
    if (N < 1) throw ConfigError("N", "N must be positive");
    const double w = p.w0 + p.w1;
    if (w <= 0.0) throw ConfigError("w", "Klein envelope needs a nonzero coupling");
    const double logw = std::log(w / 3.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 1.0);
    std::uniform_int_distribution<long> comp(0, 4 * N - 1);
    struct Draw {
        double vartheta;
        long a, b;
    };
    std::vector<Draw> draws(static_cast<std::size_t>(samples));
    for (auto& d : draws) d = {phase(rng), comp(rng), comp(rng)};
    std::vector<double> excess(draws.size(), kNegInf);
    parallel_for(draws.size(), [&](std::size_t i) {
        const auto& d = draws[i];
        const LogDet mu = minor_matrix(at_phase(p, d.vartheta), {0, N - 1}, energy, d.a, d.b);
        if (mu.singular) return;
        const double dist = static_cast<double>(std::abs(d.a / 4 - d.b / 4));
        const double fourN = 4.0 * static_cast<double>(N);
        excess[i] = mu.logAbs / fourN - (1.0 - dist / fourN) * logw;
    });
    KleinFit fit;
    fit.samples = samples;
    fit.constant = *std::max_element(excess.begin(), excess.end());
    return fit;
}

DecayProfile decay_profile(const GreenBlock& g) {
    const long N = g.window.size();
    DecayProfile prof;
    prof.logEnvelope.assign(static_cast<std::size_t>(N), kNegInf);
    for (long n = g.window.n1; n <= g.window.n2; ++n)
        for (long m = g.window.n1; m <= g.window.n2; ++m) {
            const double v = std::log(g.block(n, m).cwiseAbs().maxCoeff());
            auto& slot = prof.logEnvelope[static_cast<std::size_t>(std::abs(n - m))];
            slot = std::max(slot, v);
        }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (long d = 1; d < N; ++d) {
        const double y = prof.logEnvelope[static_cast<std::size_t>(d)];
        if (!std::isfinite(y)) continue;
        sx += d;
        sy += y;
        sxx += static_cast<double>(d) * d;
        sxy += d * y;
        ++cnt;
    }
    if (cnt >= 2) prof.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return prof;
}

GoodGreenReport good_green_check(const ModelParams& p, double energy, long N, double eps, double gamma4) {
    if (!(gamma4 > 0.0)) throw ConfigError("gamma4", "gamma4 must be positive");
    if (N < 1) throw ConfigError("N", "N must be positive");
    const GreenBlock g = green(p, {0, N - 1}, Boundary::minus, energy);
    const double rate = gamma4 / 4.0;  // per site
    const long dmin = (N + 4) / 5;
    GoodGreenReport rep;
    rep.worstMargin = kNegInf;
    for (long n = 0; n < N; ++n)
        for (long m = 0; m < N; ++m) {
            const long d = std::abs(n - m);
            if (d < dmin) continue;
            const double v = std::log(g.block(n, m).cwiseAbs().maxCoeff());
            rep.worstMargin = std::max(rep.worstMargin, v + (static_cast<double>(d) - eps * N) * rate);
        }
    rep.good = rep.worstMargin < 0.0;
    rep.profile = decay_profile(g);
    return rep;
}

double bad_set_measure(const ModelParams& p, double energy, long N, long M, double delta, double gamma4, int grid) {
    if (N < 1) throw ConfigError("N", "N must be positive");
    if (M < 1) throw ConfigError("M", "M must be positive");
    if (grid < 1) throw ConfigError("grid", "grid must be positive");
    const double threshold = (1.0 - delta) * gamma4;
    std::vector<int> bad(static_cast<std::size_t>(grid), 0);
    parallel_for(bad.size(), [&](std::size_t i) {
        double s = 0.0;
        for (long j = 0; j < M; ++j) {
            const double v = static_cast<double>(i) / grid + static_cast<double>(j) * p.alpha;
            s += log_det_per_site(at_phase(p, reduce_mod1(v)), energy, N);
        }
        bad[i] = s / static_cast<double>(M) <= threshold ? 1 : 0;
    });
    long count = 0;
    for (int b : bad) count += b;
    return static_cast<double>(count) / grid;
}

RegularityReport regularity_classify(const ModelParams& p, double energy, long n, double gamma, long k) {
    if (k < 1) throw ConfigError("k", "k must be at least 1");
    RegularityReport rep;
    rep.site = n;
    rep.gamma = gamma;
    rep.k = k;
    for (long n1 = n - k + 1; n1 <= n; ++n1) {
        const long n2 = n1 + k - 1;
        const long toLeft = 4 * n - 4 * n1;
        const long toRight = 4 * n2 + 3 - 4 * n;
        if (5 * std::min(toLeft, toRight) <= 4 * k) continue;
        ++rep.windowsTried;
        GreenBlock g;
        try {
            g = green(p, {n1, n2}, Boundary::minus, energy);
        } catch (const NumericalGuardError&) {
            continue;  // an eigenvalue at E: this window cannot witness decay
        }
        // Operator norms of the site blocks, as in the Cramer/Klein chain.
        // Single entries can vanish identically (decoupled layers at w = 0).
        const bool left = block_norm(g.block(n, n1)) < std::exp(-gamma * static_cast<double>(toLeft));
        const bool right = block_norm(g.block(n, n2)) < std::exp(-gamma * static_cast<double>(toRight));
        if (left && right) {
            rep.verdict = Verdict::regular;
            rep.witness = {n1, n2};
            return rep;
        }
    }
    rep.verdict = Verdict::singular;
    return rep;
}

double charpoly(const ModelParams& p, Window w, Boundary b, double energy) {
    const SiteBlockMatrix h = build_modified(p, w, b, Basis::layer_flipped);
    return logdet(shifted(h.entries, energy)).value().real();
}

CharpolyDefects charpoly_symmetries(const ModelParams& p, long N, double energy, const std::vector<double>& grid) {
    if (std::abs(p.phi - 0.25) > 1e-15) throw ConfigError("phi", "charpoly symmetries need phi = 1/4");
    if (N < 1) throw ConfigError("N", "N must be positive");
    const double a = p.alpha;
    const Window w0{0, N - 1};
    const Window w1{1, N};
    auto pm = [&](double v) { return charpoly(at_phase(p, v), w0, Boundary::minus, energy); };
    auto pp = [&](double v) { return charpoly(at_phase(p, v), w0, Boundary::plus, energy); };

    struct Row {
        double base[2], even, half[2], shift, trans[2];
    };
    std::vector<Row> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const double v = grid[i];
        Row& r = rows[i];
        r.base[0] = pm(v);
        r.base[1] = pp(v);
        r.even = pm(-static_cast<double>(N - 1) * a - v);
        r.half[0] = pm(v + 0.5);
        r.half[1] = pp(v + 0.5);
        r.shift = pm(v - 0.5 * a);
        r.trans[0] = charpoly(at_phase(p, v), w1, Boundary::minus, energy) - pm(v + a);
        r.trans[1] = charpoly(at_phase(p, v), w1, Boundary::plus, energy) - pp(v + a);
    });
    double scale = 0.0;
    for (const auto& r : rows) scale = std::max({scale, std::abs(r.base[0]), std::abs(r.base[1])});
    if (scale == 0.0) scale = 1.0;
    CharpolyDefects d;
    for (const auto& r : rows) {
        d.evenness = std::max(d.evenness, std::abs(r.base[0] - r.even) / scale);
        d.halfPeriod = std::max({d.halfPeriod, std::abs(r.base[0] - r.half[0]) / scale,
                                 std::abs(r.base[1] - r.half[1]) / scale});
        d.shift = std::max(d.shift, std::abs(r.base[1] - r.shift) / scale);
        d.translation = std::max({d.translation, std::abs(r.trans[0]) / scale, std::abs(r.trans[1]) / scale});
    }

    // Fourier content of s -> p^{N-}(s - (N-1) alpha / 2) on 16N + 1 samples.
    const long S = 16 * N + 1;
    const double centre = -0.5 * static_cast<double>(N - 1) * a;
    std::vector<double> f(static_cast<std::size_t>(S));
    parallel_for(f.size(), [&](std::size_t i) { f[i] = pm(centre + static_cast<double>(i) / S); });
    double total = 0.0, high = 0.0, odd = 0.0, sine = 0.0;
    for (long m = -(S / 2); m <= S / 2; ++m) {
        cplx c{0.0, 0.0};
        for (long i = 0; i < S; ++i) c += f[static_cast<std::size_t>(i)] * std::polar(1.0, -kTwoPi * m * i / S);
        c /= static_cast<double>(S);
        const double e = std::norm(c);
        total += e;
        if (std::abs(m) > 4 * N) high += e;
        if (m % 2 != 0) odd += e;
        sine += c.imag() * c.imag();
    }
    if (total > 0.0) {
        d.fourierHigh = std::sqrt(high / total);
        d.fourierOdd = std::sqrt(odd / total);
        d.fourierSine = std::sqrt(sine / total);
    }
    return d;
}

ClusterReport singular_cluster_bound(const ModelParams& p, double energy, long k, long n1, long n2, double gamma,
                                     double kleinC, double eps) {
    if (k < 2) throw ConfigError("k", "k must be at least 2");
    if (!(p.w0 > 0.0)) throw ConfigError("w0", "w0 must be positive");
    if (n2 - n1 <= (k + 1) / 2) throw ConfigError("n2", "clusters must satisfy n2 - n1 > (k + 1) / 2");
    const double a = p.alpha;
    const double L = std::abs(std::log(p.w0 / 3.0));
    const long fl = (3 * k) / 4;
    const double x1 = static_cast<double>(n1 - fl);
    const double x2 = static_cast<double>(n2 - fl);
    const long half = (k + 2) / 2;  // ceil((k + 1) / 2)
    const double kh = 0.5 * static_cast<double>(k - 1);

    ClusterReport rep;
    for (long j = 0; j <= 2 * k; ++j) {
        const double jj = static_cast<double>(j);
        const double shift = j < 2 * half ? x1 + kh + 0.5 * jj : x2 + kh + 0.5 * jj - static_cast<double>(half);
        rep.nodes.push_back(p.vartheta + shift * a);
    }
    const Window w{0, k - 1};
    auto pm = [&](double v) { return charpoly(at_phase(p, v), w, Boundary::minus, energy); };
    const double centre = 0.5 * static_cast<double>(k - 1) * a;
    auto ycoord = [&](double v) {
        const double c = std::cos(kTwoPi * (v + centre));
        return c * c;
    };

    const std::size_t m = rep.nodes.size();
    std::vector<double> y(m), val(m);
    rep.logAbsAtNodes.resize(m);
    parallel_for(m, [&](std::size_t j) {
        y[j] = ycoord(rep.nodes[j]);
        val[j] = pm(rep.nodes[j]);
        rep.logAbsAtNodes[j] = std::log(std::abs(val[j]));
    });
    std::vector<double> logDen(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < m; ++l)
            if (l != j) logDen[j] += std::log(std::abs(y[j] - y[l]));

    auto basis = [&](std::size_t j, double z) {
        double s = 0.0;
        double sign = 1.0;
        for (std::size_t l = 0; l < m; ++l) {
            if (l == j) continue;
            const double f = (z - y[l]) / (y[j] - y[l]);
            if (f == 0.0) return 0.0;
            s += std::log(std::abs(f));
            if (f < 0.0) sign = -sign;
        }
        return sign * std::exp(s);
    };

    rep.logLagrangeMax = kNegInf;
    const int zGrid = 2000;
    for (int i = 0; i <= zGrid; ++i) {
        const double z = static_cast<double>(i) / zGrid;
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            bool zero = false;
            for (std::size_t l = 0; l < m; ++l) {
                if (l == j) continue;
                if (z == y[l]) zero = true;
                else s += std::log(std::abs(z - y[l]));
            }
            if (!zero) rep.logLagrangeMax = std::max(rep.logLagrangeMax, s - logDen[j]);
        }
    }
    rep.logLagrangeMax = std::max(rep.logLagrangeMax, 0.0);  // l_j(y_j) = 1

    const double maxNode = *std::max_element(rep.logAbsAtNodes.begin(), rep.logAbsAtNodes.end());
    rep.logUpperBound = std::log(2.0 * k + 1.0) + maxNode + rep.logLagrangeMax;
    rep.logLemmaBound = std::log(2.0 * k + 1.0) + rep.logLagrangeMax +
                        4.0 * k * (L + (gamma - L / 4.0) / 5.0 + kleinC);
    rep.lowerTarget = 4.0 * k * (L - eps);

    const int G = 256;
    std::vector<double> logGrid(G);
    std::vector<double> err(G);
    parallel_for(static_cast<std::size_t>(G), [&](std::size_t i) {
        const double v = static_cast<double>(i) / G;
        const double direct = pm(v);
        logGrid[i] = std::log(std::abs(direct));
        const double z = ycoord(v);
        double interp = 0.0;
        for (std::size_t j = 0; j < m; ++j) interp += val[j] * basis(j, z);
        err[i] = std::abs(interp - direct);
    });
    const auto best = std::max_element(logGrid.begin(), logGrid.end());
    rep.logLowerWitness = *best;
    rep.witnessVartheta = static_cast<double>(best - logGrid.begin()) / G;
    rep.reconstructionError = *std::max_element(err.begin(), err.end()) / std::exp(rep.logLowerWitness);
    return rep;
}

}  // namespace dh
