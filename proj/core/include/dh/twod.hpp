#pragma once

// Two twisted square lattices: H = diag(-Delta, -Delta) + w [[0, U], [U, 0]]
// on a rectangle of Z^2 with Dirichlet boundary, and its sitewise
// conjugation to diag(-Delta + w U, -Delta - w U).

#include "dh/linalg.hpp"

#include <functional>
#include <vector>

namespace dh {

/// Real potential on the unit torus.
struct TwoDPotential {
    enum class Kind { separable_product, separable_sum, tabulated };
    Kind kind = Kind::separable_product;
    // separable kinds: U_i(x) = offset_i + cos(2 pi x)
    double offset1 = 1.5;
    double offset2 = 1.5;
    // tabulated: values on an m1 x m2 periodic grid, bilinear in between
    int m1 = 0, m2 = 0;
    std::vector<double> table;  // row-major, table[i * m2 + j] = U(i / m1, j / m2)

    double factor1(double x) const;
    double factor2(double x) const;
    double operator()(double x1, double x2) const;
};

struct Rect {
    long x1 = 0, x2 = 0;  // inclusive range of n_1
    long y1 = 0, y2 = 0;  // inclusive range of n_2
    long width() const { return x2 - x1 + 1; }
    long height() const { return y2 - y1 + 1; }
    long area() const { return width() * height(); }
};

struct TwoDParams {
    double w = 1.0;
    double alpha1 = 0.0;  // 1 / L_1
    double alpha2 = 0.0;  // 1 / L_2
    Rect window{0, 7, 0, 7};
    TwoDPotential potential;

    /// Throws ConfigError naming the field; windows beyond 64 x 64 are rejected.
    TwoDParams validated() const;
    double U(long n1, long n2) const { return potential(n1 * alpha1, n2 * alpha2); }
};

/// Basis index of site (n1, n2) and layer c in {0, 1}.
inline Eigen::Index twod_index(const Rect& r, long n1, long n2, int c) {
    return 2 * ((n1 - r.x1) * r.height() + (n2 - r.y1)) + c;
}

MatX build_2d(const TwoDParams& p);

/// -Delta + s w U on the window, one component per site (s = +-1).
MatX build_2d_scalar(const TwoDParams& p, int sign);

/// P_X for sign s = sgn U(X), with sgn(0) := +1. Real, symmetric, P^2 = I.
Mat2 sitewise_conjugator(double u);

struct BlockDiag2D {
    MatX conjugated;  // swapped P H P, ordered (all first layers, all second layers)
    double offBlockResidual = 0.0;   // Frobenius norm of the coupling between the blocks
    double conjugationDefect = 0.0;  // max |eig H - eig(conjugated)|
    double spectrumDefect = 0.0;     // max |eig H - eig diag(-Delta + wU, -Delta - wU)|
    long signChanges = 0;            // bonds whose ends have different sgn U
};

/// Conjugates by the sitewise P_X and swaps the two layers wherever
/// sgn U = +1, so that the first block carries +w U. Across a bond with
/// a sign change the second block picks up a hopping sign -1, which is the
/// gauge diag(sgn U) applied to -Delta - w U.
BlockDiag2D block_diag_2d(const TwoDParams& p);

/// 1D Dirichlet chain -Delta + s w U_i(n alpha_i) on [lo, hi].
MatX build_1d_factor(const TwoDParams& p, int axis, int sign);

struct MinkowskiReport {
    double defect = 0.0;  // max |eig H - sorted Minkowski sums|
    RVecX twoD;
    RVecX sums;
};

/// Compares spec(H) with spec(H_1^+) + spec(H_2^+) union spec(H_1^-) + spec(H_2^-),
/// the 1D x 1D decomposition of a separable potential. Exact for separable_sum;
/// for separable_product the defect measures how far the product is from it.
MinkowskiReport minkowski_check(const TwoDParams& p);

}  // namespace dh
