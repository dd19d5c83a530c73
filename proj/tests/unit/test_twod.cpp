#include <doctest.h>

#include "dh/twod.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace dh;

namespace {

TwoDParams base() {
    TwoDParams p;
    p.w = 0.8;
    p.alpha1 = (3.0 - std::sqrt(5.0)) / 2.0;
    p.alpha2 = std::sqrt(2.0) / 2.0;
    p.window = {-3, 8, 2, 11};
    return p;
}

}  // namespace

TEST_CASE("2D Hamiltonian") {
    SUBCASE("decoupled layers are separable Laplacians") {
        TwoDParams p = base();
        p.w = 0.0;
        const RVecX e = eigvalsh(build_2d(p));
        // Dirichlet chain of length m: 2 cos(pi j / (m + 1)), j = 1..m.
        std::vector<double> ref;
        const long a = p.window.width(), b = p.window.height();
        for (long i = 1; i <= a; ++i)
            for (long j = 1; j <= b; ++j)
                for (int layer = 0; layer < 2; ++layer)
                    ref.push_back(2.0 * std::cos(kPi * i / (a + 1)) + 2.0 * std::cos(kPi * j / (b + 1)));
        std::sort(ref.begin(), ref.end());
        REQUIRE(static_cast<std::size_t>(e.size()) == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(e(i) - ref[i]) < 1e-12);
    }
    SUBCASE("constant coupling shifts by +-w") {
        TwoDParams p = base();
        p.w = 2.0;
        p.potential.kind = TwoDPotential::Kind::tabulated;
        p.potential.m1 = p.potential.m2 = 3;
        p.potential.table.assign(9, 1.0);
        const RVecX e = eigvalsh(build_2d(p));
        TwoDParams free = p;
        free.w = 0.0;
        const RVecX lap = eigvalsh(build_2d(free));
        std::vector<double> ref;
        for (Eigen::Index i = 0; i < lap.size(); i += 2) {
            ref.push_back(lap(i) + 2.0);
            ref.push_back(lap(i) - 2.0);
        }
        std::sort(ref.begin(), ref.end());
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(e(i) - ref[i]) < 1e-12);
    }
    SUBCASE("structure") {
        const TwoDParams p = base();
        const MatX h = build_2d(p);
        CHECK(hermiticity_defect(h) < 1e-13);
        const long n1 = 2, n2 = 5;
        const double u = p.w * (1.5 + std::cos(kTwoPi * n1 * p.alpha1)) * (1.5 + std::cos(kTwoPi * n2 * p.alpha2));
        CHECK(h(twod_index(p.window, n1, n2, 0), twod_index(p.window, n1, n2, 1)).real() == doctest::Approx(u));
        CHECK(h(twod_index(p.window, n1, n2, 1), twod_index(p.window, n1 + 1, n2, 1)).real() == 1.0);
        CHECK(std::abs(h(twod_index(p.window, n1, n2, 0), twod_index(p.window, n1 + 1, n2, 1))) == 0.0);
    }
    SUBCASE("tabulated interpolation") {
        TwoDPotential t;
        t.kind = TwoDPotential::Kind::tabulated;
        t.m1 = 2;
        t.m2 = 2;
        t.table = {0.0, 1.0, 2.0, 3.0};
        CHECK(t(0.0, 0.5) == doctest::Approx(1.0));
        CHECK(t(0.25, 0.25) == doctest::Approx(1.5));  // mean of the four corners
        CHECK(t(1.5, -1.0) == doctest::Approx(2.0));
    }
    TwoDParams big = base();
    big.window = {0, 64, 0, 3};
    CHECK_THROWS_AS(build_2d(big), ConfigError);
    TwoDParams bad = base();
    bad.potential.kind = TwoDPotential::Kind::tabulated;
    CHECK_THROWS_AS(build_2d(bad), ConfigError);
}

TEST_CASE("sitewise block diagonalisation") {
    for (double u : {-0.7, 0.0, 2.3}) {
        const Mat2 m = sitewise_conjugator(u);
        CHECK((m * m.adjoint() - Mat2::Identity()).norm() < 1e-14);
    }
    SUBCASE("fixed sign") {
        const TwoDParams p = base();
        const auto r = block_diag_2d(p);
        CHECK(r.signChanges == 0);
        CHECK(r.offBlockResidual < 1e-12);
        CHECK(r.conjugationDefect < 1e-10);
        CHECK(r.spectrumDefect < 1e-10);
        // First block is -Delta + w U entrywise.
        const long sites = p.window.area();
        CHECK((r.conjugated.topLeftCorner(sites, sites) - build_2d_scalar(p, 1)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("sign-changing potential") {
        TwoDParams p = base();
        p.potential.offset1 = 0.2;
        p.potential.offset2 = -0.1;
        const auto r = block_diag_2d(p);
        CHECK(r.signChanges > 0);
        CHECK(r.conjugationDefect < 1e-10);
        CHECK(r.offBlockResidual < 1e-12);
        // The second block is the diag(sgn U) gauge of -Delta - w U.
        CHECK(r.spectrumDefect < 1e-10);
        const long sites = p.window.area();
        CHECK((r.conjugated.bottomRightCorner(sites, sites) - build_2d_scalar(p, -1)).cwiseAbs().maxCoeff() == doctest::Approx(2.0));
    }
}

TEST_CASE("separable potentials") {
    TwoDParams p = base();
    p.potential.kind = TwoDPotential::Kind::separable_sum;
    const auto sum = minkowski_check(p);
    CHECK(sum.defect < 1e-10);
    p.potential.offset1 = -0.3;
    CHECK(minkowski_check(p).defect < 1e-10);

    // A fixed-sign product U_1 U_2 does not split into 1D x 1D sums.
    TwoDParams q = base();
    const auto prod = minkowski_check(q);
    CHECK(prod.defect > 0.1);
    q.w = 0.0;
    CHECK(minkowski_check(q).defect < 1e-12);
}
