#include "dh/continuum.hpp"

#include "dh/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace dh {

namespace {

// Fourier coefficients (c_{-1}, c_0, c_1) of U, U_c^+ and U_c^-.
struct Harmonics {
    cplx m1, c0, p1;
};

const double kS3 = std::sqrt(3.0) / 6.0;
const Harmonics kU{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
const Harmonics kUp{cplx(-1.0 / 6.0, kS3), 1.0 / 3.0, cplx(-1.0 / 6.0, -kS3)};
const Harmonics kUm{cplx(-1.0 / 6.0, -kS3), 1.0 / 3.0, cplx(-1.0 / 6.0, kS3)};

// Adds w * (multiplication by f) into block (r, c): entry (m, m - j) = c_j.
void add_potential(MatX& h, const ContinuumParams& p, int r, int c, double w, const Harmonics& f) {
    if (w == 0.0) return;
    for (int m = -p.nModes; m <= p.nModes; ++m) {
        h(mode_index(p, m, r), mode_index(p, m, c)) += w * f.c0;
        if (m - 1 >= -p.nModes) h(mode_index(p, m, r), mode_index(p, m - 1, c)) += w * f.p1;
        if (m + 1 <= p.nModes) h(mode_index(p, m, r), mode_index(p, m + 1, c)) += w * f.m1;
    }
}

void add_derivative(MatX& h, const ContinuumParams& p, int r, int c, double kx, cplx shift) {
    for (int m = -p.nModes; m <= p.nModes; ++m)
        h(mode_index(p, m, r), mode_index(p, m, c)) += kTwoPi * m / p.L + kx + shift;
}

double dist_2pi_lattice(double x) {
    const double r = std::remainder(x, kTwoPi);
    return std::abs(r);
}

Mat4 fundamental_at(double lambda, double kx, double w0, double L, double x, double* offDiag) {
    const Mat4 u = antichiral_unitary();
    const Mat4 d = u * antichiral_B(lambda, kx, w0, L, x) * u.adjoint();
    if (offDiag) {
        Mat4 o = d;
        o.diagonal().setZero();
        *offDiag = o.cwiseAbs().maxCoeff();
    }
    Mat4 e = Mat4::Zero();
    for (int i = 0; i < 4; ++i) e(i, i) = std::exp(-d(i, i));
    return u.adjoint() * e * u;
}

Mat2 rk4_monodromy(double w1, int steps) {
    const double h = 1.0 / steps;
    const cplx f(0.0, -w1);
    Mat2 x = Mat2::Identity();
    for (int s = 0; s < steps; ++s) {
        const double t = s * h;
        const Mat2 u0 = chiral_coupling(t);
        const Mat2 uh = chiral_coupling(t + 0.5 * h);
        const Mat2 u1 = chiral_coupling(t + h);
        const Mat2 k1 = f * u0 * x;
        const Mat2 k2 = f * uh * (x + 0.5 * h * k1);
        const Mat2 k3 = f * uh * (x + 0.5 * h * k2);
        const Mat2 k4 = f * u1 * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

}  // namespace

ContinuumParams ContinuumParams::validated() const {
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("L", "L must be positive");
    if (nModes < 8) throw ConfigError("nModes", "nModes must be at least 8");
    const std::pair<const char*, double> fields[] = {{"w0", w0}, {"w1", w1}, {"kPerp", kPerp}, {"kx", kx}};
    for (const auto& [name, v] : fields)
        if (!std::isfinite(v)) throw ConfigError(name, std::string(name) + " must be finite");
    return *this;
}

MatX bloch_matrix(const ContinuumParams& in) {
    const ContinuumParams p = in.validated();
    MatX h = MatX::Zero(p.dim(), p.dim());
    const cplx ik(0.0, p.kPerp);
    add_derivative(h, p, 0, 1, p.kx, -ik);
    add_derivative(h, p, 1, 0, p.kx, ik);
    add_derivative(h, p, 2, 3, p.kx, -ik);
    add_derivative(h, p, 3, 2, p.kx, ik);
    add_potential(h, p, 0, 2, p.w0, kU);
    add_potential(h, p, 0, 3, p.w1, kUm);
    add_potential(h, p, 1, 2, p.w1, kUp);
    add_potential(h, p, 1, 3, p.w0, kU);
    add_potential(h, p, 2, 0, p.w0, kU);
    add_potential(h, p, 2, 1, p.w1, kUp);
    add_potential(h, p, 3, 0, p.w1, kUm);
    add_potential(h, p, 3, 1, p.w0, kU);
    return h;
}

MatX transformed_matrix(const ContinuumParams& in, double lambda) {
    const ContinuumParams p = in.validated();
    MatX h = MatX::Zero(p.dim(), p.dim());
    const cplx ik(0.0, p.kPerp);
    add_derivative(h, p, 0, 0, 0.0, ik);
    add_derivative(h, p, 1, 1, 0.0, ik);
    add_derivative(h, p, 2, 2, 0.0, -ik);
    add_derivative(h, p, 3, 3, 0.0, -ik);
    add_potential(h, p, 0, 1, p.w1, kUp);
    add_potential(h, p, 0, 3, p.w0, kU);
    add_potential(h, p, 1, 0, p.w1, kUm);
    add_potential(h, p, 1, 2, p.w0, kU);
    add_potential(h, p, 2, 1, p.w0, kU);
    add_potential(h, p, 2, 3, p.w1, kUm);
    add_potential(h, p, 3, 0, p.w0, kU);
    add_potential(h, p, 3, 2, p.w1, kUp);
    for (int m = -p.nModes; m <= p.nModes; ++m) {
        h(mode_index(p, m, 0), mode_index(p, m, 2)) -= lambda;
        h(mode_index(p, m, 1), mode_index(p, m, 3)) -= lambda;
        h(mode_index(p, m, 2), mode_index(p, m, 0)) -= lambda;
        h(mode_index(p, m, 3), mode_index(p, m, 1)) -= lambda;
    }
    return h;
}

std::vector<double> brillouin_grid(double L, int n) {
    if (n < 2) throw ConfigError("kxGrid", "need at least two k_x points");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = kTwoPi / L * i / (n - 1);
    return g;
}

BranchWidths flat_band_scan_continuum(const ContinuumParams& in, const std::vector<double>& kxGrid, double kPerp) {
    ContinuumParams p = in.validated();
    p.kPerp = kPerp;
    if (kxGrid.size() < 2) throw ConfigError("kxGrid", "need at least two k_x points");
    const auto [lo, hi] = std::minmax_element(kxGrid.begin(), kxGrid.end());
    if (*lo > 1e-12 || *hi < kTwoPi / p.L - 1e-12)
        throw ConfigError("kxGrid", "k_x grid must cover [0, 2 pi / L]");
    BranchWidths out;
    out.kx = kxGrid;
    out.energies.resize(kxGrid.size());
    parallel_for(kxGrid.size(), [&](std::size_t i) {
        ContinuumParams q = p;
        q.kx = kxGrid[i];
        out.energies[i] = eigvalsh(bloch_matrix(q));
    });
    const Eigen::Index n = p.dim();
    RVecX mn = out.energies[0], mx = out.energies[0];
    for (const auto& e : out.energies) {
        mn = mn.cwiseMin(e);
        mx = mx.cwiseMax(e);
        for (Eigen::Index j = 0; j + 1 < n; ++j)
            if (e(j + 1) - e(j) < 1e-8) ++out.nearCrossings;
    }
    out.widths = mx - mn;
    for (Eigen::Index j = 0; j < n; ++j)
        if (out.widths(j) < out.flatTol) ++out.flatCount;
    return out;
}

Mat4 antichiral_unitary() {
    Mat4 u;
    u << -1, 1, -1, 1,
         -1, -1, 1, 1,
         1, -1, -1, 1,
         1, 1, 1, 1;
    return 0.5 * u;
}

Mat4 antichiral_A(double lambda, double kx, double w0, double L, double x) {
    const double v = w0 * potential(PotentialKind::U, x / L);
    Mat4 a;
    a << kx, 0, -lambda, v,
         0, kx, v, -lambda,
         -lambda, v, kx, 0,
         v, -lambda, 0, kx;
    return a;
}

Mat4 antichiral_B(double lambda, double kx, double w0, double L, double x) {
    const cplx i(0.0, 1.0);
    const cplx w = w0 * (i / 3.0) * (x + L / kPi * std::sin(kTwoPi * x / L));
    const cplx a = i * kx * x;
    const cplx c = -i * lambda * x;
    Mat4 b;
    b << a, 0, c, w,
         0, a, w, c,
         c, w, a, 0,
         w, c, 0, a;
    return b;
}

double antichiral_quantization_defect(double lambda, double kx, double w0, double L) {
    double best = kPi;
    for (double s : {-1.0, 1.0})
        for (double t : {-1.0, 1.0}) best = std::min(best, dist_2pi_lattice((kx + s * lambda + t * w0 / 3.0) * L));
    return best;
}

AntichiralSolution antichiral_closed_form(double lambda, double kx, double w0, double L, int gridPoints) {
    if (!(L > 0.0)) throw ConfigError("L", "L must be positive");
    if (gridPoints < 2) throw ConfigError("gridPoints", "need at least two grid points");
    AntichiralSolution s;
    s.lambda = lambda;
    s.kx = kx;
    s.w0 = w0;
    s.L = L;
    s.quantizationDefect = antichiral_quantization_defect(lambda, kx, w0, L);
    const double freq = 1.0 + std::abs(kx) + std::abs(lambda) + std::abs(w0) * (1.0 + kTwoPi / L);
    const double h = 0.05 / freq;
    static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    const cplx mi(0.0, -1.0);
    for (int g = 0; g <= gridPoints; ++g) {
        const double x = L * g / gridPoints;
        double off = 0.0;
        s.x.push_back(x);
        s.fundamental.push_back(fundamental_at(lambda, kx, w0, L, x, &off));
        s.diagonalDefect = std::max(s.diagonalDefect, off);
        Mat4 d = Mat4::Zero();
        for (int k = 1; k <= 4; ++k)
            d += c[k - 1] * (fundamental_at(lambda, kx, w0, L, x + k * h, nullptr) -
                             fundamental_at(lambda, kx, w0, L, x - k * h, nullptr));
        const Mat4 r = mi * d / h + antichiral_A(lambda, kx, w0, L, x) * s.fundamental.back();
        s.odeResidual = std::max(s.odeResidual, r.cwiseAbs().maxCoeff());
    }
    return s;
}

Mat2 chiral_coupling(double x) {
    Mat2 u = Mat2::Zero();
    u(0, 1) = potential(PotentialKind::Uc_plus, x);
    u(1, 0) = potential(PotentialKind::Uc_minus, x);
    return u;
}

MonodromyResult chiral_monodromy(double w1, int steps) {
    if (steps < 1024) throw ConfigError("steps", "steps must be at least 1024");
    if (!std::isfinite(w1)) throw ConfigError("w1", "w1 must be finite");
    MonodromyResult r;
    r.w1 = w1;
    r.h = 1.0 / (2.0 * steps);
    const Mat2 coarse = rk4_monodromy(w1, steps);
    r.matrix = rk4_monodromy(w1, 2 * steps);
    r.halvingError = (r.matrix - coarse).cwiseAbs().maxCoeff();
    if (r.halvingError > 1e-8)
        throw NumericalGuardError("monodromy integration not converged: step halving changes M by " +
                                  std::to_string(r.halvingError));
    r.detDefect = std::abs(r.matrix.determinant() - 1.0);
    r.trace = r.matrix.trace();
    return r;
}

Mat2 monodromy_odd_part(double w1, int steps) {
    if (w1 == 0.0) throw ConfigError("w1", "w1 must be non-zero");
    return (chiral_monodromy(w1, steps).matrix - chiral_monodromy(-w1, steps).matrix) / (2.0 * w1);
}

TraceExpansion trace_expansion(const std::vector<double>& couplings, int steps) {
    if (couplings.size() < 2) throw ConfigError("couplings", "need at least two couplings");
    for (std::size_t i = 1; i < couplings.size(); ++i)
        if (std::abs(couplings[i - 1] - 2.0 * couplings[i]) > 1e-12 * couplings[i - 1])
            throw ConfigError("couplings", "couplings must halve successively");
    TraceExpansion t;
    t.couplings = couplings;
    for (double w : couplings) t.ratios.push_back((chiral_monodromy(w, steps).trace.real() - 2.0) / (w * w));
    std::vector<double> col = t.ratios;
    double f = 4.0;
    while (col.size() > 1) {
        std::vector<double> next;
        for (std::size_t i = 1; i < col.size(); ++i) next.push_back((f * col[i] - col[i - 1]) / (f - 1.0));
        col = next;
        f *= 4.0;
    }
    t.richardson = col[0];
    return t;
}

ZeroEnergyReport zero_energy_chiral(double w1, const std::vector<int>& stepsGrid) {
    if (stepsGrid.empty()) throw ConfigError("stepsGrid", "need at least one step count");
    ZeroEnergyReport z;
    Mat2 prev;
    MonodromyResult last;
    for (std::size_t i = 0; i < stepsGrid.size(); ++i) {
        last = chiral_monodromy(w1, stepsGrid[i]);
        z.integrationError = std::max(z.integrationError, last.halvingError);
        if (i > 0) z.integrationError = std::max(z.integrationError, (last.matrix - prev).cwiseAbs().maxCoeff());
        prev = last.matrix;
    }
    const Eigen::ComplexEigenSolver<Mat2> es(last.matrix);
    const cplx i(0.0, 1.0);
    for (int k = 0; k < 2; ++k) {
        z.rho[k] = es.eigenvalues()(k);
        if (std::abs(z.rho[k]) > 0.0) {
            z.inSpectrumGlobally = true;
            z.mu[k] = i * std::log(z.rho[k]);
            if (std::abs(z.mu[k].imag()) < 1e-8) z.realQuasimomentum = true;
        }
    }
    z.traceDefect = std::abs(last.trace - 2.0);
    z.excludedAtKxZero = z.traceDefect > 10.0 * z.integrationError && z.traceDefect > 1e-13;
    return z;
}

}  // namespace dh
