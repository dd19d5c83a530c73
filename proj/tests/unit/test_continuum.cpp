#include <doctest.h>

#include "dh/continuum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace dh;

namespace {

double u_plain(double x) { return (1.0 + 2.0 * std::cos(kTwoPi * x)) / 3.0; }
double u_plus(double x) { return (1.0 - std::cos(kTwoPi * x) + std::sqrt(3.0) * std::sin(kTwoPi * x)) / 3.0; }
double u_minus(double x) { return (1.0 - std::cos(kTwoPi * x) - std::sqrt(3.0) * std::sin(kTwoPi * x)) / 3.0; }

double nearest(const RVecX& e, double x) {
    double b = 1e300;
    for (Eigen::Index i = 0; i < e.size(); ++i) b = std::min(b, std::abs(e(i) - x));
    return b;
}

// Fourier coefficient j of f on [0, 1); the rectangle rule is exact here.
cplx fourier_coefficient(double (*f)(double), int j) {
    const int n = 4096;
    cplx s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        s += f(x) * std::exp(cplx(0.0, -kTwoPi * j * x));
    }
    return s / static_cast<double>(n);
}

}  // namespace

TEST_CASE("Bloch matrix") {
    SUBCASE("free Dirac dispersion") {
        ContinuumParams p;
        p.L = 1.7;
        p.kx = 0.4;
        p.kPerp = 0.9;
        p.nModes = 12;
        const RVecX e = eigvalsh(bloch_matrix(p));
        std::vector<double> ref;
        for (int m = -p.nModes; m <= p.nModes; ++m) {
            const double d = kTwoPi * m / p.L + p.kx;
            const double r = std::sqrt(d * d + p.kPerp * p.kPerp);
            for (double s : {-r, -r, r, r}) ref.push_back(s);
        }
        std::sort(ref.begin(), ref.end());
        REQUIRE(static_cast<std::size_t>(e.size()) == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(e(i) - ref[i]) < 1e-12);
    }
    SUBCASE("Hermitian with harmonic couplings") {
        ContinuumParams p;
        p.w0 = 0.8;
        p.w1 = 1.3;
        p.kx = 0.2;
        p.kPerp = 0.3;
        p.nModes = 8;
        const MatX h = bloch_matrix(p);
        CHECK(h.rows() == 4 * 17);
        CHECK(hermiticity_defect(h) < 1e-15);
        // Block (0, 3) is w1 U_c^-: entry (m, m') is its Fourier coefficient m - m'.
        for (int j = -1; j <= 1; ++j) {
            CHECK(std::abs(h(mode_index(p, 2, 0), mode_index(p, 2 - j, 3)) - p.w1 * fourier_coefficient(u_minus, j)) < 1e-12);
            CHECK(std::abs(h(mode_index(p, 2, 1), mode_index(p, 2 - j, 2)) - p.w1 * fourier_coefficient(u_plus, j)) < 1e-12);
            CHECK(std::abs(h(mode_index(p, 2, 0), mode_index(p, 2 - j, 2)) - p.w0 * fourier_coefficient(u_plain, j)) < 1e-12);
        }
        CHECK(std::abs(h(mode_index(p, 2, 0), mode_index(p, 4, 2))) == 0.0);
    }
    SUBCASE("truncation self-convergence") {
        for (auto [w0, w1] : {std::pair{2.0, 0.0}, std::pair{0.0, 2.0}, std::pair{1.0, 1.5}}) {
            ContinuumParams a;
            a.w0 = w0;
            a.w1 = w1;
            a.kx = 1.1;
            a.nModes = 32;
            ContinuumParams b = a;
            b.nModes = 64;
            const RVecX ea = eigvalsh(bloch_matrix(a));
            const RVecX eb = eigvalsh(bloch_matrix(b));
            double worst = 0.0;
            for (Eigen::Index i = 0; i < ea.size(); ++i)
                if (std::abs(ea(i)) < kTwoPi * 16) worst = std::max(worst, nearest(eb, ea(i)));
            CHECK(worst < 1e-8);
        }
    }
    SUBCASE("Brillouin periodicity") {
        ContinuumParams p;
        p.w0 = 0.7;
        p.w1 = 1.2;
        p.L = 2.0;
        p.kx = 0.3;
        p.nModes = 40;
        ContinuumParams q = p;
        q.kx = p.kx + kTwoPi / p.L;
        const RVecX e = eigvalsh(bloch_matrix(p));
        const RVecX f = eigvalsh(bloch_matrix(q));
        for (Eigen::Index i = 0; i < e.size(); ++i)
            if (std::abs(e(i)) < 20.0) CHECK(nearest(f, e(i)) < 1e-9);
    }
    CHECK_THROWS_AS(bloch_matrix(ContinuumParams{.nModes = 4}), ConfigError);
    CHECK_THROWS_AS(bloch_matrix(ContinuumParams{.L = 0.0}), ConfigError);
}

TEST_CASE("transformed operator") {
    ContinuumParams p;
    p.w0 = 0.9;
    p.w1 = 0.6;
    p.kPerp = 0.25;
    p.nModes = 16;
    const double lambda = 0.45;
    const MatX lhat = transformed_matrix(p, lambda);
    MatX shifted = bloch_matrix(p);
    shifted -= lambda * MatX::Identity(p.dim(), p.dim());
    const int rows[4] = {1, 3, 0, 2};
    const int cols[4] = {0, 2, 1, 3};
    double defect = 0.0;
    for (int m = -p.nModes; m <= p.nModes; ++m)
        for (int mm = -p.nModes; mm <= p.nModes; ++mm)
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    defect = std::max(defect, std::abs(lhat(mode_index(p, m, r), mode_index(p, mm, c)) -
                                                       shifted(mode_index(p, m, rows[r]), mode_index(p, mm, cols[c]))));
    CHECK(defect == 0.0);

    // lambda in Spec L(k_x) exactly when -k_x is an eigenvalue of Lhat_lambda(0).
    ContinuumParams q = p;
    q.kx = 0.37;
    const RVecX e = eigvalsh(bloch_matrix(q));
    const Eigen::Index mid = e.size() / 2;
    for (Eigen::Index j : {mid - 1, mid, mid + 3}) {
        const Eigen::ComplexEigenSolver<MatX> es(transformed_matrix(p, e(j)), false);
        double best = 1e300;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            best = std::min(best, std::abs(es.eigenvalues()(i) + q.kx));
        CHECK(best < 1e-6);
    }
}

TEST_CASE("flat-band scan") {
    ContinuumParams p;
    p.nModes = 16;
    const auto grid = brillouin_grid(p.L, 64);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == doctest::Approx(kTwoPi));
    const auto free = flat_band_scan_continuum(p, grid, 0.0);
    CHECK(free.widths(0) == doctest::Approx(kTwoPi).epsilon(1e-12));
    // Lowest positive level min_m |2 pi m + k_x| sampled on the grid.
    double top = 0.0;
    for (double k : grid) top = std::max(top, std::min(k, kTwoPi - k));
    CHECK(free.widths(free.widths.size() / 2) == doctest::Approx(top).epsilon(1e-12));

    ContinuumParams ac = p;
    ac.w0 = 1.0;
    CHECK(flat_band_scan_continuum(ac, grid, 0.0).flatCount == 0);
    ContinuumParams ch = p;
    ch.w1 = 1.0;
    const auto c = flat_band_scan_continuum(ch, grid, 0.0);
    CHECK(c.flatCount == 0);
    CHECK(c.widths.minCoeff() > 1e-6);
    CHECK_THROWS_AS(flat_band_scan_continuum(p, {0.0, 1.0}, 0.0), ConfigError);
}

TEST_CASE("anti-chiral closed form") {
    struct Case {
        double lambda, kx, w0, L;
    };
    for (const Case c : {Case{0.7, 0.3, 1.0, 1.0}, Case{-1.2, 2.0, 4.0, 2.5}, Case{0.0, 0.1, 0.5, 0.8}}) {
        const auto s = antichiral_closed_form(c.lambda, c.kx, c.w0, c.L, 128);
        CHECK(s.diagonalDefect < 1e-12);
        CHECK(s.odeResidual < 1e-8);
        CHECK((s.fundamental.front() - Mat4::Identity()).norm() < 1e-14);

        // Independent RK4 integration of phi' = -i A phi from the identity.
        const int steps = 4096;
        const double h = c.L / steps;
        auto a = [&](double x) {
            const double v = c.w0 * u_plain(x / c.L);
            Mat4 m;
            m << c.kx, 0, -c.lambda, v, 0, c.kx, v, -c.lambda, -c.lambda, v, c.kx, 0, v, -c.lambda, 0, c.kx;
            return Mat4(cplx(0.0, -1.0) * m);
        };
        Mat4 phi = Mat4::Identity();
        double worst = 0.0;
        for (int i = 0; i < steps; ++i) {
            const double x = i * h;
            const Mat4 k1 = a(x) * phi;
            const Mat4 k2 = a(x + h / 2) * (phi + h / 2 * k1);
            const Mat4 k3 = a(x + h / 2) * (phi + h / 2 * k2);
            const Mat4 k4 = a(x + h) * (phi + h * k3);
            phi += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if ((i + 1) % (steps / 128) == 0)
                worst = std::max(worst, (phi - s.fundamental[(i + 1) / (steps / 128)]).cwiseAbs().maxCoeff());
        }
        CHECK(worst < 1e-9);
    }

    SUBCASE("quantised k_x puts lambda in the Bloch spectrum") {
        const double lambda = 0.7, w0 = 1.0;
        for (double sgn : {-1.0, 1.0}) {
            ContinuumParams p;
            p.w0 = w0;
            p.kx = kTwoPi - lambda + sgn * w0 / 3.0;
            CHECK(antichiral_quantization_defect(lambda, p.kx, w0, 1.0) < 1e-14);
            CHECK(nearest(eigvalsh(bloch_matrix(p)), lambda) < 1e-6);
            // The period map is then the identity on one column.
            const auto s = antichiral_closed_form(lambda, p.kx, w0, 1.0, 64);
            const Mat4 mono = s.fundamental.back();
            const Eigen::ComplexEigenSolver<Mat4> es(mono, false);
            double best = 1e300;
            for (int i = 0; i < 4; ++i) best = std::min(best, std::abs(es.eigenvalues()(i) - 1.0));
            CHECK(best < 1e-12);
        }
        ContinuumParams off;
        off.w0 = w0;
        off.kx = 2.5;
        CHECK(antichiral_quantization_defect(lambda, off.kx, w0, 1.0) > 0.1);
        CHECK(nearest(eigvalsh(bloch_matrix(off)), lambda) > 1e-3);
    }
}

TEST_CASE("chiral monodromy") {
    for (double w : {0.1, 0.5, 1.0, 2.0}) {
        const auto m = chiral_monodromy(w);
        CHECK(m.detDefect < 1e-10);
        CHECK(m.halvingError < 1e-8);
        CHECK(std::abs(m.trace.imag()) < 1e-12);
    }
    const auto zero = chiral_monodromy(0.0);
    CHECK(zero.matrix == Mat2::Identity());
    CHECK(std::abs(monodromy_odd_part(0.1).trace()) < 1e-6);
    CHECK_THROWS_AS(chiral_monodromy(0.1, 100), ConfigError);

    // tr X_2(1) = -int_0^1 int_0^x (U+(x) U-(y) + U-(x) U+(y)) dy dx by
    // midpoint quadrature of the running integrals.
    const int n = 20000;
    double ip = 0.0, im = 0.0, x2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n;
        const double hp = u_plus(x) / n, hm = u_minus(x) / n;
        x2 -= u_plus(x) * (im + 0.5 * hm) / n + u_minus(x) * (ip + 0.5 * hp) / n;
        ip += hp;
        im += hm;
    }
    const auto t = trace_expansion({0.1, 0.05, 0.025});
    CHECK(t.ratios.size() == 3);
    CHECK(t.richardson == doctest::Approx(x2).epsilon(1e-6));
    CHECK(std::abs(t.richardson + 1.0 / 9.0) < 1e-8);
    CHECK_THROWS_AS(trace_expansion({0.1, 0.07}), ConfigError);
}

TEST_CASE("zero energy in the chiral limit") {
    for (double w : {0.1, 0.3, 1.0}) {
        const auto z = zero_energy_chiral(w);
        CHECK(z.inSpectrumGlobally);
        CHECK(z.realQuasimomentum);
        CHECK(z.excludedAtKxZero);
        for (int k = 0; k < 2; ++k) CHECK(std::abs(std::exp(cplx(0.0, 1.0) * z.mu[k]) * z.rho[k] - 1.0) < 1e-12);
    }
    const auto z3 = zero_energy_chiral(0.3);
    CHECK(z3.traceDefect == doctest::Approx(0.09 / 9.0).epsilon(0.01));
    CHECK(z3.traceDefect > 1e-8);
    const auto z0 = zero_energy_chiral(0.0);
    CHECK_FALSE(z0.excludedAtKxZero);
    CHECK(z0.inSpectrumGlobally);
}
