#include "dh/model.hpp"

#include <cmath>

namespace dh {

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) throw ConfigError(field, std::string(field) + " must be finite");
}

}  // namespace

double reduce_mod1(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    return r;
}

ModelParams ModelParams::validated() const {
    require_finite(w0, "w0");
    require_finite(w1, "w1");
    require_finite(alpha, "alpha");
    require_finite(theta, "theta");
    require_finite(phi, "phi");
    require_finite(vartheta, "vartheta");
    if (w0 < 0.0) throw ConfigError("w0", "w0 must be non-negative");
    if (w1 < 0.0) throw ConfigError("w1", "w1 must be non-negative");
    if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("alpha", "alpha must lie in [0, 1)");
    ModelParams out = *this;
    out.theta = reduce_mod1(theta);
    out.vartheta = reduce_mod1(vartheta);
    // phi is kept as given: shifting it by 1 moves the potential by alpha.
    return out;
}

namespace gamma {

Mat2 pauli(int i) {
    Mat2 m = Mat2::Zero();
    switch (i) {
        case 1:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case 2:
            m(0, 1) = cplx(0.0, -1.0);
            m(1, 0) = cplx(0.0, 1.0);
            break;
        case 3:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
        default:
            throw ConfigError("pauli", "pauli index must be 1, 2 or 3");
    }
    return m;
}

Mat4 g15() {
    Mat4 m = Mat4::Zero();
    m.block<2, 2>(0, 0) = pauli(1);
    m.block<2, 2>(2, 2) = pauli(1);
    return m;
}

Mat4 g25() {
    Mat4 m = Mat4::Zero();
    m.block<2, 2>(0, 0) = pauli(2);
    m.block<2, 2>(2, 2) = pauli(2);
    return m;
}

}  // namespace gamma

Mat4 hopping_t(double theta) {
    return std::cos(kTwoPi * theta) * gamma::g15() + std::sin(kTwoPi * theta) * gamma::g25();
}

Mat4 potential_block(const ModelParams& p, cplx x) {
    Mat4 v = Mat4::Zero();
    if (p.w0 != 0.0) {
        const cplx a = p.w0 * potential(PotentialKind::U, x - p.phi * p.alpha);
        const cplx b = p.w0 * potential(PotentialKind::U, x + p.phi * p.alpha);
        v(0, 2) = v(2, 0) = a;
        v(1, 3) = v(3, 1) = b;
    }
    if (p.w1 != 0.0) {
        v(0, 3) = v(3, 0) = p.w1 * potential(PotentialKind::Uc_minus, x);
        v(1, 2) = v(2, 1) = p.w1 * potential(PotentialKind::Uc_plus, x);
    }
    return v;
}

Mat4 site_potential(const ModelParams& p, long n) {
    return potential_block(p, cplx(p.vartheta + static_cast<double>(n) * p.alpha, 0.0));
}

long BlockChain::first_component(const Window& w, Boundary b) {
    return b == Boundary::plus ? 4 * w.n1 - 2 : 4 * w.n1;
}

MatX BlockChain::restrict_components(long gStart, Eigen::Index dim) const {
    MatX h = MatX::Zero(dim, dim);
    if (dim == 0) return h;
    const long gEnd = gStart + static_cast<long>(dim);  // exclusive
    const long s0 = floor_div(gStart, 4);
    const long s1 = floor_div(gEnd - 1, 4);
    auto put = [&](long site_r, long site_c, const Mat4& blk) {
        for (int a = 0; a < 4; ++a) {
            const long gr = 4 * site_r + a;
            if (gr < gStart || gr >= gEnd) continue;
            for (int b = 0; b < 4; ++b) {
                const long gc = 4 * site_c + b;
                if (gc < gStart || gc >= gEnd) continue;
                h(gr - gStart, gc - gStart) += blk(a, b);
            }
        }
    };
    for (long s = s0; s <= s1; ++s) {
        put(s, s, onsite(s));
        if (s < s1) {
            const Mat4 t = hop(s);
            put(s, s + 1, t);
            put(s + 1, s, t.adjoint());
        }
    }
    return h;
}

BandMatrix BlockChain::restrict_components_band(long gStart, Eigen::Index dim) const {
    BandMatrix h(dim, 7, 7);
    const long gEnd = gStart + static_cast<long>(dim);
    const long s0 = floor_div(gStart, 4);
    const long s1 = floor_div(gEnd - 1, 4);
    auto put = [&](long site_r, long site_c, const Mat4& blk) {
        for (int a = 0; a < 4; ++a) {
            const long gr = 4 * site_r + a;
            if (gr < gStart || gr >= gEnd) continue;
            for (int b = 0; b < 4; ++b) {
                const long gc = 4 * site_c + b;
                if (gc < gStart || gc >= gEnd) continue;
                if (blk(a, b) != cplx(0.0, 0.0)) h(gr - gStart, gc - gStart) += blk(a, b);
            }
        }
    };
    for (long s = s0; s <= s1; ++s) {
        put(s, s, onsite(s));
        if (s < s1) {
            const Mat4 t = hop(s);
            put(s, s + 1, t);
            put(s + 1, s, t.adjoint());
        }
    }
    return h;
}

BlockChain standard_chain(const ModelParams& p) {
    const Mat4 t0 = gamma::g15();
    const Mat4 t = hopping_t(p.theta);
    BlockChain c;
    c.onsite = [p, t0](long n) -> Mat4 { return t0 + site_potential(p, n); };
    c.hop = [t](long) -> Mat4 { return t; };
    return c;
}

namespace {

void check_window(const Window& w) {
    if (w.n2 < w.n1) throw ConfigError("window", "window must satisfy n1 <= n2");
}

}  // namespace

SiteBlockMatrix build_finite(const ModelParams& p, Window w, Boundary b) {
    check_window(w);
    if (b == Boundary::floquet) throw ConfigError("boundary", "use build_floquet for periodic boundaries");
    SiteBlockMatrix out;
    out.boundary = b;
    out.window = w;
    out.entries = standard_chain(p).restrict_components(BlockChain::first_component(w, b), 4 * w.size());
    return out;
}

BandMatrix build_finite_shifted_band(const ModelParams& p, Window w, Boundary b, cplx energy) {
    check_window(w);
    if (b == Boundary::floquet) throw ConfigError("boundary", "banded builder takes minus or plus");
    BandMatrix h = standard_chain(p).restrict_components_band(BlockChain::first_component(w, b), 4 * w.size());
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i, i) -= energy;
    return h;
}

std::optional<Fraction> as_fraction(double alpha, long maxDen, double tol) {
    for (long q = 1; q <= maxDen; ++q) {
        const double pq = std::round(alpha * static_cast<double>(q));
        if (std::abs(alpha - pq / static_cast<double>(q)) < tol) {
            return Fraction{static_cast<long>(pq), q};
        }
    }
    return std::nullopt;
}

SiteBlockMatrix build_floquet(const ModelParams& p, Fraction frac, double k) {
    if (frac.den < 1) throw ConfigError("alpha", "Floquet period must be positive");
    const long q = frac.den;
    const BlockChain chain = standard_chain(p);
    SiteBlockMatrix out;
    out.boundary = Boundary::floquet;
    out.window = {0, q - 1};
    out.blochPhase = k;
    out.entries = MatX::Zero(4 * q, 4 * q);
    const cplx ph = std::polar(1.0, k);
    for (long n = 0; n < q; ++n) {
        out.entries.block<4, 4>(4 * n, 4 * n) += chain.onsite(n);
        const long m = (n + 1) % q;
        const Mat4 t = chain.hop(n) * ph;
        // Additive so q = 1, 2 pick up both bond directions.
        out.entries.block<4, 4>(4 * n, 4 * m) += t;
        out.entries.block<4, 4>(4 * m, 4 * n) += t.adjoint();
    }
    return out;
}

Mat4 layer_flip() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = 1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 3) = 1.0;
    return m;
}

BlockChain modified_chain(const ModelParams& p, Basis basis) {
    const Mat4 t0 = gamma::g15();
    const Mat4 t = hopping_t(-p.theta);
    const Mat4 P = basis == Basis::layer_flipped ? layer_flip() : Mat4::Identity();
    BlockChain c;
    c.onsite = [p, t0, P](long n) -> Mat4 {
        const double x = p.vartheta + static_cast<double>(n) * p.alpha;
        Mat4 v = t0;
        const double a = p.w0 * std::cos(kTwoPi * (x - p.phi * p.alpha));
        const double b = p.w0 * std::cos(kTwoPi * (x + p.phi * p.alpha));
        v(0, 2) += a;
        v(2, 0) += a;
        v(1, 3) += b;
        v(3, 1) += b;
        return P * v * P;
    };
    const Mat4 tp = P * t * P;
    c.hop = [tp](long) -> Mat4 { return tp; };
    return c;
}

SiteBlockMatrix build_modified(const ModelParams& p, Window w, Boundary b, Basis basis) {
    check_window(w);
    if (b == Boundary::floquet) throw ConfigError("boundary", "modified model takes minus or plus");
    SiteBlockMatrix out;
    out.boundary = b;
    out.window = w;
    out.entries = modified_chain(p, basis).restrict_components(BlockChain::first_component(w, b), 4 * w.size());
    return out;
}

// Both are site-diagonal signatures S with S H S = -H in the respective limit.
Mat4 particle_hole_conjugator_chiral() {
    return Eigen::Vector4cd(1.0, -1.0, 1.0, -1.0).asDiagonal();
}

Mat4 particle_hole_conjugator_antichiral() {
    return Eigen::Vector4cd(1.0, -1.0, -1.0, 1.0).asDiagonal();
}

}  // namespace dh
