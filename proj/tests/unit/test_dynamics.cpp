#include <doctest.h>

#include "dh/dynamics.hpp"

#include <algorithm>
#include <cmath>

using namespace dh;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

// ||[X, H] psi||^2 with X the site position, straight from the matrix.
double velocity_square(const ModelParams& p, const WavepacketState& s) {
    const MatX h = build_finite(p, s.window).entries;
    VecX xpsi = s.amplitudes;
    for (Eigen::Index i = 0; i < xpsi.size(); ++i) xpsi(i) *= static_cast<double>(s.site(i));
    VecX hpsi = h * s.amplitudes;
    for (Eigen::Index i = 0; i < hpsi.size(); ++i) hpsi(i) *= static_cast<double>(s.site(i));
    return (h * xpsi - hpsi).squaredNorm();
}

}  // namespace

TEST_CASE("initial states") {
    const Window w{-80, 80};
    const double sigma = std::sqrt(70.0);
    const auto g = gaussian_packet(sigma, 0, 1, w);
    CHECK(std::abs(g.norm() - 1.0) < 1e-14);
    // Proportional to exp(-n^2 / (2 sigma^2)) / sqrt(2 pi sigma^2) e_1.
    const double ratio = std::abs(g.amplitudes(4 * 80)) * std::sqrt(2.0 * kPi * sigma * sigma);
    for (long n = -40; n <= 40; n += 7) {
        const double ref = std::exp(-n * n / (2.0 * sigma * sigma)) / std::sqrt(2.0 * kPi * sigma * sigma);
        CHECK(std::abs(g.amplitudes(4 * (n + 80))) == doctest::Approx(ref * ratio).epsilon(1e-12));
        for (int c = 1; c < 4; ++c) CHECK(g.amplitudes(4 * (n + 80) + c) == cplx(0.0, 0.0));
    }
    const auto d = gaussian_packet(1e-3, 3, 2, {-5, 5});
    CHECK(std::abs(d.amplitudes(4 * 8 + 1)) == doctest::Approx(1.0));
    CHECK(d.amplitudes.squaredNorm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(gaussian_packet(sigma, 0, 1, {-40, 40}), ConfigError);
    CHECK_THROWS_AS(gaussian_packet(1.0, 0, 5, {-40, 40}), ConfigError);
}

TEST_CASE("unitary evolution") {
    ModelParams p;
    p.w0 = 0.7;
    p.w1 = 0.4;
    p.alpha = kGolden;
    p.theta = 0.2;
    const Window w{-60, 60};
    const Propagator prop(p, w);
    const auto psi0 = gaussian_packet(3.0, 0, 1, w);
    const auto states = prop.evolve(psi0, {0.0, 1.0, 5.0, 12.0});
    CHECK((states[0].amplitudes - psi0.amplitudes).norm() < 1e-12);
    const double e0 = prop.energy(psi0);
    for (const auto& s : states) {
        CHECK(std::abs(s.norm() - 1.0) < 1e-10);
        CHECK(std::abs(prop.energy(s) - e0) < 1e-9);
        CHECK(boundary_mass(s, 10) < 1e-8);
    }
    const auto back = prop.evolve(states.back(), {-12.0});
    CHECK((back[0].amplitudes - psi0.amplitudes).norm() < 1e-8);
    CHECK(back[0].time == doctest::Approx(0.0));

    SUBCASE("boundary guard names the time") {
        try {
            prop.evolve(psi0, {1.0, 200.0});
            FAIL("guard did not trip");
        } catch (const NumericalGuardError& e) {
            CHECK(std::string(e.what()).find("t = 200") != std::string::npos);
        }
    }
}

TEST_CASE("free transport is ballistic") {
    ModelParams free;
    free.alpha = kGolden;
    const Window w{-110, 110};
    const Propagator prop(free, w);
    SUBCASE("single site") {
        const auto psi0 = site_packet(0, 1, w);
        const double v2 = velocity_square(free, psi0);
        CHECK(v2 == doctest::Approx(2.0));
        for (const auto& s : prop.evolve(psi0, {10.0, 20.0, 30.0, 40.0}))
            CHECK(second_moment(s) == doctest::Approx(v2 * s.time * s.time).epsilon(1e-9));
    }
    SUBCASE("Gaussian") {
        const auto psi0 = gaussian_packet(3.0, 0, 1, w);
        const double m0 = second_moment(psi0);
        const double v2 = velocity_square(free, psi0);
        for (const auto& s : prop.evolve(psi0, {10.0, 25.0, 40.0}))
            CHECK(second_moment(s) == doctest::Approx(m0 + v2 * s.time * s.time).epsilon(1e-9));
    }
    SUBCASE("layers stay decoupled") {
        const auto trace = layer_trace(prop.evolve(site_packet(0, 1, w), {0.0, 7.0, 31.0}));
        for (const auto& m : trace) {
            CHECK(m[0] + m[1] + m[2] + m[3] == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(m[2] < 1e-20);
            CHECK(m[3] < 1e-20);
        }
    }
}

TEST_CASE("dynamical localisation functional") {
    const Window w{-100, 99};
    ModelParams p;
    p.w0 = 30.0;
    p.alpha = kGolden;
    const auto psi0 = site_packet(0, 1, w);
    const auto at0 = dynloc_moment(p, psi0, {0.0});
    CHECK(at0.supremum == doctest::Approx(1.0));

    const auto grid = geometric_time_grid(1.0, 1000.0, 64, true);
    std::vector<double> half;
    std::copy_if(grid.begin(), grid.end(), std::back_inserter(half), [](double t) { return t <= 500.0; });
    const auto full = dynloc_moment(p, psi0, grid);
    const auto first = dynloc_moment(p, psi0, half);
    CHECK(full.supremum / first.supremum < 1.05);

    // Refining the grid can only raise the sampled supremum.
    const auto coarse = dynloc_moment(p, psi0, geometric_time_grid(1.0, 1000.0, 8, true));
    CHECK(full.supremum >= coarse.supremum);

    ModelParams free;
    free.alpha = kGolden;
    const Window big{-110, 110};
    const auto lin = dynloc_moment(free, site_packet(0, 1, big), {10.0, 20.0, 40.0});
    for (std::size_t i = 0; i < lin.times.size(); ++i)
        CHECK(lin.moments[i] == doctest::Approx(std::sqrt(1.0 + 2.0 * lin.times[i] * lin.times[i])).epsilon(1e-9));
}

TEST_CASE("layer oscillation at weak coupling") {
    ModelParams p;
    p.w0 = 0.1;
    p.alpha = 1.0 / 3.0;
    const Window w{-250, 250};
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(2.0 * i);
    const auto trace = layer_trace(evolve(p, gaussian_packet(std::sqrt(70.0), 0, 1, w), grid));
    std::vector<double> layer1;
    for (const auto& m : trace) {
        CHECK(m[0] + m[1] + m[2] + m[3] == doctest::Approx(1.0).epsilon(1e-10));
        layer1.push_back(m[0] + m[1]);
    }
    // Mass leaves the starting layer and comes back.
    const auto lo = std::min_element(layer1.begin(), layer1.end());
    CHECK(*lo < 0.5);
    CHECK(*std::max_element(lo, layer1.end()) > *lo + 0.2);
    const auto g = geometric_time_grid(1.0, 100.0, 10);
    CHECK(g.size() == 21);
    CHECK(g.front() == doctest::Approx(1.0));
    CHECK(g.back() == doctest::Approx(100.0));
}
