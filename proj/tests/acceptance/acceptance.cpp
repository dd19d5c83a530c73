// Acceptance run: one PASS/FAIL line per criterion, exit status = number of failures.

#include "dh/arith.hpp"
#include "dh/cocycle.hpp"
#include "dh/continuum.hpp"
#include "dh/dynamics.hpp"
#include "dh/greens.hpp"
#include "dh/spectra.hpp"
#include "dh/twod.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace dh;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

struct Outcome {
    bool pass = true;
    std::string detail;

    // Records one measurement and whether it met its threshold.
    void note(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
        char buf[256];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        if (!detail.empty()) detail += "; ";
        detail += buf;
        if (!ok) {
            detail += " [miss]";
            pass = false;
        }
    }
};

// Random real-energy cocycle steps: A^dagger Omega A = Omega and det A = 1.
Outcome symplectic() {
    Outcome o;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double form = 0.0, det = 0.0;
    for (int i = 0; i < 1000; ++i) {
        TransferCocycle c;
        c.params.w0 = 10.0 * u(rng);
        c.params.w1 = 10.0 * u(rng);
        c.params.alpha = u(rng);
        c.params.theta = u(rng);
        c.params.phi = u(rng);
        c.energy = cplx(20.0 * u(rng) - 10.0, 0.0);
        const Mat8 a = one_step(c, u(rng));
        const Mat8 om = symplectic_form(c.params.theta);
        form = std::max(form, (a.adjoint() * om * a - om).norm());
        det = std::max(det, std::abs(a.determinant() - 1.0));
    }
    o.note(form < 1e-12, "max |A*OA - O|_F = %.2e", form);
    o.note(det < 1e-10, "max |det A - 1| = %.2e", det);
    return o;
}

// Pairing gamma_{i+4} = -gamma_i and the lower / upper bounds at w0 = 30.
Outcome lyapunov_bounds() {
    Outcome o;
    TransferCocycle c;
    c.params.w0 = 30.0;
    c.params.alpha = kGolden;
    const auto l = lyapunov(c, {100000, 16, 0, 1000});
    const double w = c.params.w0, E = 0.0;
    const double up = std::log(2.0 + std::abs(E) + w), lw = std::log(w / 3.0);
    double pair = 0.0, lowMiss = 0.0, upMiss = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double tol = 2.0 * std::max(l.stderrs[i], l.stderrs[7 - i]) + 1e-12;
        pair = std::max(pair, std::abs(l.exponents[i] + l.exponents[7 - i]) - tol);
        const int k = i + 1;
        const double lower = std::max(k * lw - (k - 1) * up, 0.0);
        lowMiss = std::max(lowMiss, lower - l.exponents[i] - 2.0 * l.stderrs[i]);
        upMiss = std::max(upMiss, l.exponents[i] - up - 2.0 * l.stderrs[i]);
    }
    double sumErr = 0.0;
    for (int i = 0; i < 4; ++i) sumErr += l.stderrs[i];
    const double g4 = l.partial_sum(4);
    o.note(pair <= 0.0, "pairing excess over 2 stderr = %.2e", std::max(pair, 0.0));
    o.note(lowMiss <= 0.0 && upMiss <= 0.0, "gamma_1..4 = %.5f %.5f %.5f %.5f in [lower, log %.0f]",
           l.exponents[0], l.exponents[1], l.exponents[2], l.exponents[3], 2.0 + w);
    o.note(g4 >= 4.0 * lw - 2.0 * sumErr, "gamma^4 = %.5f vs 4 log(w0/3) = %.5f", g4, 4.0 * lw);
    o.note(l.converged, "stderr %.1e", l.stderr);
    return o;
}

// Top four complexified exponents approach 2 pi eps with slope 2 pi.
Outcome complexified() {
    Outcome o;
    double top[2] = {0.0, 0.0};
    const double eps[2] = {2.0, 3.0};
    for (int j = 0; j < 2; ++j) {
        TransferCocycle c;
        c.params.w0 = 3.0;
        c.params.alpha = kGolden;
        c.epsilon = eps[j];
        const auto l = lyapunov_complexified(c, {20000, 8, 0, 500});
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            worst = std::max(worst, std::abs(l.exponents[i] / (kTwoPi * eps[j]) - 1.0));
            top[j] += l.exponents[i] / 4.0;
        }
        o.note(worst < 0.02, "eps = %g: max rel dev from 2 pi eps = %.2e", eps[j], worst);
    }
    const double slope = top[1] - top[0];
    o.note(std::abs(slope / kTwoPi - 1.0) < 0.01, "slope = %.6f (2 pi = %.6f)", slope, kTwoPi);
    return o;
}

Outcome thouless() {
    Outcome o;
    ModelParams p;
    p.w0 = 30.0;
    p.alpha = kGolden;
    const auto r = thouless_check(p, 0.0, 2000, 32, {100000, 16, 0, 1000});
    o.note(r.gap < 0.05 * r.gamma4Cocycle, "gamma4 cocycle %.5f, log-det %.5f, gap %.2e (skipped %d of %d)",
           r.gamma4Cocycle, r.gamma4Determinant, r.gap, r.skipped, r.samples);
    return o;
}

Outcome amo() {
    Outcome o;
    double res = 0.0, spec = 0.0;
    for (double w0 : {1.5, 3.0, 6.0}) {
        ModelParams p;
        p.w0 = w0;
        p.alpha = kGolden;
        const auto r = amo_block_diagonalize(p, 300);
        res = std::max(res, r.residual);
        spec = std::max(spec, r.spectrumDefect);
    }
    o.note(res < 1e-12, "off-block residual %.2e", res);
    o.note(spec < 1e-10, "block spectra defect %.2e", spec);
    const auto scan = amo_critical_scan({1.5, 3.0, 6.0}, kGolden, 600);
    o.note(scan[1].measure < scan[0].measure && scan[1].measure < scan[2].measure,
           "measure at w0 = 1.5, 3, 6: %.3f %.3f %.3f", scan[0].measure, scan[1].measure, scan[2].measure);
    return o;
}

// (H - E)^{-1}_{ba} = (-1)^{a+b} mu_{a,b} / det(H - E).
Outcome cramer() {
    Outcome o;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<long> len(1, 20);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        ModelParams p;
        p.w0 = 3.0 * u(rng);
        p.w1 = 3.0 * u(rng);
        p.alpha = u(rng);
        p.theta = u(rng);
        p.phi = u(rng);
        p.vartheta = u(rng);
        const long N = len(rng);
        const Window w{-2, -2 + N - 1};
        const double E = 4.0 * u(rng) - 2.0;
        MatX h = build_finite(p, w).entries;
        h.diagonal().array() -= E;
        const MatX inv = h.inverse();
        const LogDet det = restricted_logdet(p, w, E);
        const double scale = inv.cwiseAbs().maxCoeff();
        std::uniform_int_distribution<Eigen::Index> idx(0, 4 * N - 1);
        for (int s = 0; s < 5; ++s) {
            const Eigen::Index a = idx(rng), b = idx(rng);
            const LogDet mu = minor_matrix(p, w, E, a, b);
            const double sign = (a + b) % 2 == 0 ? 1.0 : -1.0;
            const cplx ratio = sign * mu.phase / det.phase * std::exp(mu.logAbs - det.logAbs);
            // Entries far below the largest one are measured against 1e-3 of it.
            worst = std::max(worst, std::abs(inv(b, a) - ratio) / std::max(std::abs(inv(b, a)), 1e-3 * scale));
        }
    }
    o.note(worst < 1e-6, "max relative defect over 1000 entries = %.2e", worst);
    return o;
}

Outcome cayley_hamilton() {
    Outcome o;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    double worst = 1e300;
    int rejected = 0;
    for (int trial = 0; trial < 100000; ++trial) {
        Mat8 t;
        Vec8 v;
        for (int i = 0; i < 8; ++i) {
            v(i) = cplx(nd(rng), nd(rng));
            for (int j = 0; j < 8; ++j) t(i, j) = cplx(nd(rng), nd(rng));
        }
        t *= std::exp(nd(rng));
        v.normalize();
        try {
            worst = std::min(worst, ch_norm_bound(t, v).value);
        } catch (const ConfigError&) {
            ++rejected;
        }
    }
    o.note(worst >= 0.125, "min over trials of max_i |T^i v| = %.4f (%d ill-conditioned draws skipped)", worst,
           rejected);
    return o;
}

Outcome charpoly_identities() {
    Outcome o;
    ModelParams p;
    p.w0 = 2.0;
    p.alpha = kGolden;
    p.phi = 0.25;
    std::vector<double> grid;
    for (int i = 0; i < 64; ++i) grid.push_back(i / 64.0 + 0.007);
    const auto d = charpoly_symmetries(p, 12, 0.3, grid);
    o.note(d.evenness < 1e-8, "evenness %.1e", d.evenness);
    o.note(d.halfPeriod < 1e-8, "half-period %.1e", d.halfPeriod);
    o.note(d.shift < 1e-8, "+-shift %.1e", d.shift);
    o.note(d.translation < 1e-8, "translation %.1e", d.translation);
    o.note(d.fourierHigh < 1e-8 && d.fourierOdd < 1e-8 && d.fourierSine < 1e-8,
           "Fourier |m| > 4N %.1e, odd %.1e, sine %.1e", d.fourierHigh, d.fourierOdd, d.fourierSine);
    return o;
}

Outcome particle_hole() {
    Outcome o;
    ModelParams ch;
    ch.w1 = 2.0;
    ch.alpha = kGolden;
    ch.theta = 0.3;
    ModelParams ac;
    ac.w0 = 2.0;
    ac.alpha = kGolden;
    ac.theta = 0.3;
    const double dc = particle_hole_check(ch, 200), da = particle_hole_check(ac, 200);
    o.note(dc < 1e-10, "chiral %.1e", dc);
    o.note(da < 1e-10, "anti-chiral %.1e", da);
    return o;
}

Outcome no_flat_bands() {
    Outcome o;
    double tb = 1e300;
    for (long q : {2L, 3L, 5L}) {
        ModelParams ac;
        ac.w0 = 1.0;
        ModelParams ch;
        ch.w1 = 1.0;
        for (const auto& p : {ac, ch})
            for (const auto& b : flat_band_check(p, {1, q}, 32)) tb = std::min(tb, b.width());
    }
    o.note(tb > 1e-6, "tight-binding q in {2,3,5}: min width %.3e", tb);
    double cw = 1e300;
    for (auto [w0, w1] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
        ContinuumParams c;
        c.w0 = w0;
        c.w1 = w1;
        const auto r = flat_band_scan_continuum(c, brillouin_grid(1.0, 64), 0.0);
        cw = std::min(cw, r.widths.minCoeff());
    }
    o.note(cw > 1e-6, "continuum 64-point grid: min width %.3e", cw);
    return o;
}

Outcome continuum_monodromy() {
    Outcome o;
    const auto m = chiral_monodromy(0.1);
    o.note(m.detDefect < 1e-10, "|det M - 1| = %.1e", m.detDefect);
    const auto t = trace_expansion({0.1, 0.05, 0.025});
    o.note(std::abs(t.richardson - 1.0) < 0.01, "Richardson (tr M - 2)/w1^2 = %.8f (target 1)", t.richardson);
    for (double w1 : {0.1, 0.3}) {
        const auto z = zero_energy_chiral(w1);
        o.note(z.excludedAtKxZero, "w1 = %g: |tr M - 2| = %.2e", w1, z.traceDefect);
    }
    const double lambda = 0.7, w0 = 1.0;
    const auto s = antichiral_closed_form(lambda, 0.3, w0, 1.0, 256);
    o.note(s.odeResidual < 1e-8, "closed-form ODE residual %.1e", s.odeResidual);
    double dist = 0.0;
    for (double sgn : {-1.0, 1.0}) {
        ContinuumParams c;
        c.w0 = w0;
        c.kx = kTwoPi - lambda + sgn * w0 / 3.0;
        const RVecX e = eigvalsh(bloch_matrix(c));
        double best = 1e300;
        for (Eigen::Index i = 0; i < e.size(); ++i) best = std::min(best, std::abs(e(i) - lambda));
        dist = std::max(dist, best);
    }
    o.note(dist < 1e-6, "quantised k_x: dist(lambda, Bloch spectrum) = %.1e", dist);
    return o;
}

Outcome transport() {
    Outcome o;
    {
        ModelParams free;
        free.alpha = kGolden;
        const Window w{-450, 450};
        std::vector<double> times;
        for (int i = 0; i <= 15; ++i) times.push_back(50.0 + 10.0 * i);
        double lo = 1e300, hi = 0.0;
        for (const auto& s : evolve(free, site_packet(0, 1, w), times)) {
            const double r = second_moment(s) / (s.time * s.time);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        o.note(hi / lo - 1.0 < 0.1, "free <n^2>/t^2 in [%.4f, %.4f] on t in [50, 200]", lo, hi);
    }
    {
        ModelParams p;
        p.w0 = 30.0;
        p.alpha = kGolden;
        const Window w{-200, 199};
        const auto grid = geometric_time_grid(1.0, 1e4, 64, true);
        std::vector<double> half;
        std::copy_if(grid.begin(), grid.end(), std::back_inserter(half), [](double t) { return t <= 5e3; });
        const auto psi0 = site_packet(0, 1, w);
        const double full = dynloc_moment(p, psi0, grid).supremum, first = dynloc_moment(p, psi0, half).supremum;
        o.note(full / first < 1.05, "w0 = 30 sup ratio over doubled horizon %.4f", full / first);
    }
    {
        ModelParams p;
        p.w1 = 1.9;
        p.alpha = 1.0 / kPi;
        const Window w{-300, 300};
        const double T = 2e4;
        try {
            const auto st = evolve(p, gaussian_packet(std::sqrt(70.0), 0, 1, w), {T / 2.0, T});
            const double ratio = participation_ratio(st[1]) / participation_ratio(st[0]);
            o.note(ratio < 1.1, "chiral w1 = 1.9, L = pi: participation ratio growth %.3f", ratio);
        } catch (const NumericalGuardError& e) {
            o.note(false, "chiral w1 = 1.9, L = pi: packet reaches the window edge (%s)", e.what());
        }
    }
    return o;
}

Outcome twod() {
    Outcome o;
    TwoDParams p;
    p.w = 0.8;
    p.alpha1 = (3.0 - std::sqrt(5.0)) / 2.0;
    p.alpha2 = std::sqrt(2.0) / 2.0;
    p.window = {0, 11, 0, 9};
    const auto r = block_diag_2d(p);
    o.note(r.offBlockResidual < 1e-12, "fixed-sign residual %.1e", r.offBlockResidual);
    const double prod = minkowski_check(p).defect;
    o.note(prod < 1e-8, "product U1 U2 vs 1D+1D Minkowski sums: defect %.3f", prod);
    TwoDParams s = p;
    s.potential.kind = TwoDPotential::Kind::separable_sum;
    o.detail += "; additive U1 + U2 for reference: defect " + std::to_string(minkowski_check(s).defect);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"symplectic structure", symplectic},
        {"Lyapunov pairing and bounds", lyapunov_bounds},
        {"complexified Lyapunov asymptotics", complexified},
        {"Thouless consistency", thouless},
        {"almost-Mathieu equivalence", amo},
        {"Cramer minor identity", cramer},
        {"Cayley-Hamilton bound", cayley_hamilton},
        {"characteristic polynomial symmetries", charpoly_identities},
        {"particle-hole symmetry", particle_hole},
        {"no flat bands", no_flat_bands},
        {"continuum monodromy", continuum_monodromy},
        {"transport dichotomy", transport},
        {"2D block diagonalisation", twod},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("error: ") + e.what();
        }
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        std::printf("%s  %s (%.1fs): %s\n", out.pass ? "PASS" : "FAIL", name, dt.count(), out.detail.c_str());
        std::fflush(stdout);
        failures += out.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
