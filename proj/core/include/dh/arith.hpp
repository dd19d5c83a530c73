#pragma once

// Arithmetic of the moire length: continued fractions, Diophantine margins
// and the Cayley-Hamilton norm lemma behind the Liouville argument.

#include "dh/linalg.hpp"

#include <string>
#include <vector>

namespace dh {

__extension__ typedef __int128 i128;

struct Convergent {
    long long p = 0;
    long long q = 1;
};

struct ContinuedFraction {
    double alpha = 0.0;
    std::vector<long long> quotients;  // a_1, a_2, ... (alpha = [0; a_1, a_2, ...])
    std::vector<Convergent> convergents;
    int depth = 0;
    bool rational = false;  // terminated with an exact fraction
    std::string note;       // why the expansion stopped
};

/// Exact expansion of a / b (0 < a < b).
ContinuedFraction convergents_exact(i128 a, i128 b, int depth);

/// Convergents of a double in (0, 1). The double is an exact dyadic
/// rational; its expansion is carried out in integers and cut once
/// |alpha - p/q| drops below 1e-15, beyond which the float no longer
/// determines the quotients. Values within 1e-15 of p/q with q <= 1e6
/// terminate with that fraction.
ContinuedFraction convergents(double alpha, int depth);

struct DiophantineMargin {
    long k = 0;
    double margin = 0.0;  // |k|^exponent * dist(k alpha, Z) at the worst k
    bool passes(double t) const { return margin > t; }
};

/// min over 1 <= |k| <= kMax of |k|^exponent dist(k alpha, Z).
DiophantineMargin diophantine_margin(double alpha, long kMax, double exponent = 2.0);

/// Same for alpha = num / den held exactly (den up to ~1e36).
DiophantineMargin diophantine_margin_exact(i128 num, i128 den, long kMax, double exponent = 2.0);

/// sum_{j=1}^{terms} 10^{-j!} as an exact fraction over 10^{terms!}
/// (terms <= 4, since 10^{5!} does not fit).
void liouville_fraction(int terms, i128& num, i128& den);

struct NormBound {
    double value = 0.0;  // max over i in +-{1..8} of ||T^i v||
    int power = 0;       // the maximising i
};

/// Throws ConfigError("T") when cond(T) >= 1e12.
NormBound ch_norm_bound(const Mat8& t, const Vec8& v);

}  // namespace dh
