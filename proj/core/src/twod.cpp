#include "dh/twod.hpp"

#include <algorithm>
#include <cmath>

namespace dh {

namespace {

double frac(double x) { return x - std::floor(x); }

double max_sorted_mismatch(RVecX a, RVecX b) {
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    if (a.size() != b.size()) return INFINITY;
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

int sgn(double u) { return u >= 0.0 ? 1 : -1; }

}  // namespace

double TwoDPotential::factor1(double x) const { return offset1 + std::cos(kTwoPi * x); }
double TwoDPotential::factor2(double x) const { return offset2 + std::cos(kTwoPi * x); }

double TwoDPotential::operator()(double x1, double x2) const {
    switch (kind) {
        case Kind::separable_product:
            return factor1(x1) * factor2(x2);
        case Kind::separable_sum:
            return factor1(x1) + factor2(x2);
        case Kind::tabulated: {
            const double u = frac(x1) * m1, v = frac(x2) * m2;
            const int i = static_cast<int>(std::floor(u)) % m1, j = static_cast<int>(std::floor(v)) % m2;
            const double a = u - std::floor(u), b = v - std::floor(v);
            auto t = [&](int r, int c) { return table[static_cast<std::size_t>((r % m1) * m2 + c % m2)]; };
            return (1 - a) * (1 - b) * t(i, j) + a * (1 - b) * t(i + 1, j) + (1 - a) * b * t(i, j + 1) +
                   a * b * t(i + 1, j + 1);
        }
    }
    return 0.0;
}

TwoDParams TwoDParams::validated() const {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("w", "w must be finite and >= 0");
    if (!std::isfinite(alpha1)) throw ConfigError("alpha1", "alpha1 must be finite");
    if (!std::isfinite(alpha2)) throw ConfigError("alpha2", "alpha2 must be finite");
    if (window.width() < 1 || window.height() < 1) throw ConfigError("window", "window must be nonempty");
    if (window.width() > 64 || window.height() > 64) throw ConfigError("window", "window exceeds 64 x 64");
    if (potential.kind == TwoDPotential::Kind::tabulated) {
        if (potential.m1 < 1 || potential.m2 < 1 ||
            potential.table.size() != static_cast<std::size_t>(potential.m1) * potential.m2)
            throw ConfigError("potential", "tabulated potential needs m1 * m2 values");
        for (double v : potential.table)
            if (!std::isfinite(v)) throw ConfigError("potential", "tabulated potential must be finite");
    }
    return *this;
}

MatX build_2d(const TwoDParams& in) {
    const TwoDParams p = in.validated();
    const Rect& r = p.window;
    const Eigen::Index n = 2 * r.area();
    MatX h = MatX::Zero(n, n);
    for (long a = r.x1; a <= r.x2; ++a)
        for (long b = r.y1; b <= r.y2; ++b) {
            const double u = p.w * p.U(a, b);
            h(twod_index(r, a, b, 0), twod_index(r, a, b, 1)) = u;
            h(twod_index(r, a, b, 1), twod_index(r, a, b, 0)) = u;
            for (int c = 0; c < 2; ++c) {
                if (a < r.x2) {
                    h(twod_index(r, a, b, c), twod_index(r, a + 1, b, c)) = 1.0;
                    h(twod_index(r, a + 1, b, c), twod_index(r, a, b, c)) = 1.0;
                }
                if (b < r.y2) {
                    h(twod_index(r, a, b, c), twod_index(r, a, b + 1, c)) = 1.0;
                    h(twod_index(r, a, b + 1, c), twod_index(r, a, b, c)) = 1.0;
                }
            }
        }
    return h;
}

MatX build_2d_scalar(const TwoDParams& in, int sign) {
    const TwoDParams p = in.validated();
    const Rect& r = p.window;
    MatX h = MatX::Zero(r.area(), r.area());
    auto idx = [&](long a, long b) { return (a - r.x1) * r.height() + (b - r.y1); };
    for (long a = r.x1; a <= r.x2; ++a)
        for (long b = r.y1; b <= r.y2; ++b) {
            h(idx(a, b), idx(a, b)) = sign * p.w * p.U(a, b);
            if (a < r.x2) h(idx(a, b), idx(a + 1, b)) = h(idx(a + 1, b), idx(a, b)) = 1.0;
            if (b < r.y2) h(idx(a, b), idx(a, b + 1)) = h(idx(a, b + 1), idx(a, b)) = 1.0;
        }
    return h;
}

Mat2 sitewise_conjugator(double u) {
    const double s = sgn(u);
    Mat2 m;
    m << -s, 1.0, 1.0, s;
    return m / std::sqrt(2.0);
}

BlockDiag2D block_diag_2d(const TwoDParams& in) {
    const TwoDParams p = in.validated();
    const Rect& r = p.window;
    const MatX h = build_2d(p);
    const long sites = r.area();
    // Q = S P: sitewise conjugator followed by the layer swap where sgn U = +1.
    MatX q = MatX::Zero(2 * sites, 2 * sites);
    BlockDiag2D out;
    for (long a = r.x1; a <= r.x2; ++a)
        for (long b = r.y1; b <= r.y2; ++b) {
            const double u = p.U(a, b);
            Mat2 m = sitewise_conjugator(u);
            if (sgn(u) > 0) m.row(0).swap(m.row(1));
            q.block<2, 2>(twod_index(r, a, b, 0), twod_index(r, a, b, 0)) = m;
            if (a < r.x2 && sgn(u) != sgn(p.U(a + 1, b))) ++out.signChanges;
            if (b < r.y2 && sgn(u) != sgn(p.U(a, b + 1))) ++out.signChanges;
        }
    const MatX c = q * h * q.adjoint();
    // Reorder to (first layers, second layers).
    Eigen::VectorXi perm(2 * sites);
    for (long s = 0; s < sites; ++s) {
        perm(2 * s) = static_cast<int>(s);
        perm(2 * s + 1) = static_cast<int>(sites + s);
    }
    const Eigen::PermutationMatrix<Eigen::Dynamic> pm(perm);
    out.conjugated = pm * c * pm.transpose();
    out.offBlockResidual = std::sqrt(out.conjugated.topRightCorner(sites, sites).squaredNorm() +
                                     out.conjugated.bottomLeftCorner(sites, sites).squaredNorm());
    const RVecX eh = eigvalsh(h);
    out.conjugationDefect = max_sorted_mismatch(eh, eigvalsh(out.conjugated));
    RVecX model(2 * sites);
    model << eigvalsh(build_2d_scalar(p, 1)), eigvalsh(build_2d_scalar(p, -1));
    out.spectrumDefect = max_sorted_mismatch(eh, model);
    return out;
}

MatX build_1d_factor(const TwoDParams& in, int axis, int sign) {
    const TwoDParams p = in.validated();
    if (axis != 1 && axis != 2) throw ConfigError("axis", "axis must be 1 or 2");
    const long lo = axis == 1 ? p.window.x1 : p.window.y1;
    const long hi = axis == 1 ? p.window.x2 : p.window.y2;
    const double alpha = axis == 1 ? p.alpha1 : p.alpha2;
    const long n = hi - lo + 1;
    MatX h = MatX::Zero(n, n);
    for (long i = 0; i < n; ++i) {
        const double x = (lo + i) * alpha;
        h(i, i) = sign * p.w * (axis == 1 ? p.potential.factor1(x) : p.potential.factor2(x));
        if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = 1.0;
    }
    return h;
}

MinkowskiReport minkowski_check(const TwoDParams& in) {
    const TwoDParams p = in.validated();
    if (p.potential.kind == TwoDPotential::Kind::tabulated)
        throw ConfigError("potential", "Minkowski check needs a separable potential");
    MinkowskiReport out;
    out.twoD = eigvalsh(build_2d(p));
    std::vector<double> sums;
    for (int s : {1, -1}) {
        const RVecX a = eigvalsh(build_1d_factor(p, 1, s));
        const RVecX b = eigvalsh(build_1d_factor(p, 2, s));
        for (Eigen::Index i = 0; i < a.size(); ++i)
            for (Eigen::Index j = 0; j < b.size(); ++j) sums.push_back(a(i) + b(j));
    }
    std::sort(sums.begin(), sums.end());
    out.sums = Eigen::Map<RVecX>(sums.data(), static_cast<Eigen::Index>(sums.size()));
    out.defect = max_sorted_mismatch(out.twoD, out.sums);
    return out;
}

}  // namespace dh
