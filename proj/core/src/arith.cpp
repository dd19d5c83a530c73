#include "dh/arith.hpp"

#include "dh/model.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace dh {

namespace {

// Euclid on a / b, appending quotients and convergents until the remainder
// vanishes, depth is reached or stop(p, q) asks to cut.
template <class Stop>
void expand(ContinuedFraction& cf, i128 a, i128 b, int depth, Stop stop) {
    i128 pPrev = 1, p = 0, qPrev = 0, q = 1;
    while (cf.depth < depth) {
        if (a == 0) {
            cf.rational = true;
            cf.note = "exact fraction";
            return;
        }
        const i128 quot = b / a;
        const i128 rem = b % a;
        const i128 pn = quot * p + pPrev;
        const i128 qn = quot * q + qPrev;
        if (qn > static_cast<i128>(INT64_MAX)) {
            cf.note = "denominator exceeds 64 bits";
            return;
        }
        cf.quotients.push_back(static_cast<long long>(quot));
        cf.convergents.push_back({static_cast<long long>(pn), static_cast<long long>(qn)});
        ++cf.depth;
        pPrev = p;
        p = pn;
        qPrev = q;
        q = qn;
        b = a;
        a = rem;
        if (a == 0) {
            cf.rational = true;
            cf.note = "exact fraction";
            return;
        }
        if (stop(static_cast<long long>(pn), static_cast<long long>(qn))) {
            cf.note = "float precision reached; further quotients are not determined by alpha";
            return;
        }
    }
    cf.note = "depth limit";
}

}  // namespace

ContinuedFraction convergents_exact(i128 a, i128 b, int depth) {
    if (!(a > 0 && a < b)) throw ConfigError("alpha", "alpha must lie in (0, 1)");
    if (depth < 1) throw ConfigError("depth", "depth must be positive");
    ContinuedFraction cf;
    cf.alpha = static_cast<double>(static_cast<long double>(a) / static_cast<long double>(b));
    expand(cf, a, b, depth, [](long long, long long) { return false; });
    return cf;
}

ContinuedFraction convergents(double alpha, int depth) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "alpha must lie in (0, 1)");
    if (alpha < 0x1p-60) throw ConfigError("alpha", "alpha too small for exact expansion");
    if (depth < 1) throw ConfigError("depth", "depth must be positive");
    if (const auto f = as_fraction(alpha)) {
        ContinuedFraction cf = convergents_exact(f->num, f->den, depth);
        cf.alpha = alpha;
        return cf;
    }
    int e = 0;
    const double m = std::frexp(alpha, &e);  // alpha = m 2^e, m in [1/2, 1)
    const i128 a = static_cast<i128>(std::ldexp(m, 53));
    const i128 b = static_cast<i128>(1) << (53 - e);
    ContinuedFraction cf;
    cf.alpha = alpha;
    const long double x = alpha;
    expand(cf, a, b, depth, [x](long long p, long long q) {
        return std::abs(x - static_cast<long double>(p) / static_cast<long double>(q)) < 1e-15L;
    });
    return cf;
}

DiophantineMargin diophantine_margin(double alpha, long kMax, double exponent) {
    if (kMax < 1) throw ConfigError("kMax", "kMax must be at least 1");
    DiophantineMargin best{0, INFINITY};
    const long double a = alpha;
    for (long k = 1; k <= kMax; ++k) {
        const long double y = k * a;
        const long double d = std::abs(y - std::round(y));
        const double m = static_cast<double>(std::pow(static_cast<long double>(k), exponent) * d);
        if (m < best.margin) best = {k, m};
    }
    return best;
}

DiophantineMargin diophantine_margin_exact(i128 num, i128 den, long kMax, double exponent) {
    if (kMax < 1) throw ConfigError("kMax", "kMax must be at least 1");
    if (!(den > 0 && num >= 0 && num < den)) throw ConfigError("alpha", "alpha must lie in [0, 1)");
    DiophantineMargin best{0, INFINITY};
    i128 r = 0;
    const long double dd = static_cast<long double>(den);
    for (long k = 1; k <= kMax; ++k) {
        r += num;
        if (r >= den) r -= den;
        const i128 d = r < den - r ? r : den - r;
        const double m = static_cast<double>(std::pow(static_cast<long double>(k), exponent) *
                                             (static_cast<long double>(d) / dd));
        if (m < best.margin) best = {k, m};
    }
    return best;
}

void liouville_fraction(int terms, i128& num, i128& den) {
    if (terms < 1 || terms > 4) throw ConfigError("terms", "terms must be 1..4");
    int fact[5] = {1, 1, 2, 6, 24};
    auto pow10 = [](int e) {
        i128 x = 1;
        for (int i = 0; i < e; ++i) x *= 10;
        return x;
    };
    den = pow10(fact[terms]);
    num = 0;
    for (int j = 1; j <= terms; ++j) num += pow10(fact[terms] - fact[j]);
}

NormBound ch_norm_bound(const Mat8& t, const Vec8& v) {
    if (std::abs(v.norm() - 1.0) > 1e-12) throw ConfigError("v", "v must be a unit vector");
    const Eigen::JacobiSVD<Mat8> svd(t);
    const auto& s = svd.singularValues();
    if (!(s(7) > 0.0) || s(0) / s(7) >= 1e12) throw ConfigError("T", "T is singular or too ill-conditioned");
    const Mat8 inv = t.inverse();
    NormBound out;
    Vec8 fwd = v, bwd = v;
    for (int i = 1; i <= 8; ++i) {
        fwd = t * fwd;
        bwd = inv * bwd;
        if (fwd.norm() > out.value) out = {fwd.norm(), i};
        if (bwd.norm() > out.value) out = {bwd.norm(), -i};
    }
    return out;
}

}  // namespace dh
