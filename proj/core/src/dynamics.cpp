#include "dh/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dh {

namespace {

void check_component(int component) {
    if (component < 1 || component > 4) throw ConfigError("component", "component must be 1..4");
}

void check_contains(const Window& w, long center) {
    if (center < w.n1 || center > w.n2) throw ConfigError("center", "center must lie in the window");
}

}  // namespace

WavepacketState gaussian_packet(double sigma, long center, int component, Window window) {
    if (!(sigma > 0.0)) throw ConfigError("sigma", "sigma must be positive");
    check_component(component);
    if (window.n2 < window.n1) throw ConfigError("window", "window must satisfy n1 <= n2");
    const double reach = 6.0 * sigma;
    if (static_cast<double>(center) - reach < static_cast<double>(window.n1) ||
        static_cast<double>(center) + reach > static_cast<double>(window.n2))
        throw ConfigError("window", "window must contain center +/- 6 sigma");
    WavepacketState s;
    s.window = window;
    s.amplitudes = VecX::Zero(4 * window.size());
    for (long n = window.n1; n <= window.n2; ++n) {
        const double d = static_cast<double>(n - center);
        s.amplitudes(4 * (n - window.n1) + component - 1) = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    s.amplitudes /= s.amplitudes.norm();
    return s;
}

WavepacketState site_packet(long center, int component, Window window) {
    check_component(component);
    check_contains(window, center);
    WavepacketState s;
    s.window = window;
    s.amplitudes = VecX::Zero(4 * window.size());
    s.amplitudes(4 * (center - window.n1) + component - 1) = 1.0;
    return s;
}

Propagator::Propagator(const ModelParams& p, Window window)
    : window_(window), eig_(eigh(build_finite(p.validated(), window).entries)) {}

std::vector<WavepacketState> Propagator::evolve(const WavepacketState& psi0, const std::vector<double>& times) const {
    if (psi0.window.n1 != window_.n1 || psi0.window.n2 != window_.n2)
        throw ConfigError("window", "state and propagator windows differ");
    const VecX c = eig_.vectors.adjoint() * psi0.amplitudes;
    std::vector<WavepacketState> out;
    out.reserve(times.size());
    VecX phased(c.size());
    for (double t : times) {
        for (Eigen::Index j = 0; j < c.size(); ++j) phased(j) = std::polar(1.0, -eig_.values(j) * t) * c(j);
        WavepacketState s;
        s.window = window_;
        s.time = psi0.time + t;
        s.amplitudes = eig_.vectors * phased;
        const double edge = boundary_mass(s, guardSites);
        if (edge >= guardMass) {
            std::ostringstream msg;
            msg << "boundary mass " << edge << " exceeds " << guardMass << " at t = " << t;
            throw NumericalGuardError(msg.str());
        }
        out.push_back(std::move(s));
    }
    return out;
}

double Propagator::energy(const WavepacketState& psi) const {
    const VecX c = eig_.vectors.adjoint() * psi.amplitudes;
    double e = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) e += eig_.values(j) * std::norm(c(j));
    return e;
}

std::vector<WavepacketState> evolve(const ModelParams& p, const WavepacketState& psi0, const std::vector<double>& times) {
    return Propagator(p, psi0.window).evolve(psi0, times);
}

double boundary_mass(const WavepacketState& psi, int sites) {
    const Eigen::Index n = psi.amplitudes.size();
    const Eigen::Index k = std::min<Eigen::Index>(4 * sites, n);
    double m = psi.amplitudes.head(k).squaredNorm();
    if (n > k) m += psi.amplitudes.tail(std::min(k, n - k)).squaredNorm();
    return m;
}

double second_moment(const WavepacketState& psi) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
        const double n = static_cast<double>(psi.site(i));
        s += n * n * std::norm(psi.amplitudes(i));
    }
    return s;
}

double weighted_moment(const WavepacketState& psi) {
    return std::sqrt(psi.amplitudes.squaredNorm() + second_moment(psi));
}

double participation_ratio(const WavepacketState& psi) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 3 < psi.amplitudes.size(); i += 4) {
        const double m = psi.amplitudes.segment<4>(i).squaredNorm();
        s += m * m;
    }
    return 1.0 / s;
}

DynlocResult dynloc_moment(const ModelParams& p, const WavepacketState& psi0, const std::vector<double>& timeGrid) {
    DynlocResult r;
    r.times = timeGrid;
    for (const auto& s : evolve(p, psi0, timeGrid)) {
        r.moments.push_back(weighted_moment(s));
        r.supremum = std::max(r.supremum, r.moments.back());
    }
    return r;
}

std::vector<std::array<double, 4>> layer_trace(const std::vector<WavepacketState>& states) {
    std::vector<std::array<double, 4>> out;
    out.reserve(states.size());
    for (const auto& s : states) {
        std::array<double, 4> m{};
        for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) m[static_cast<std::size_t>(i % 4)] += std::norm(s.amplitudes(i));
        out.push_back(m);
    }
    return out;
}

std::vector<double> geometric_time_grid(double t0, double t1, int perDecade, bool includeZero) {
    if (!(t0 > 0.0) || !(t1 >= t0)) throw ConfigError("times", "need 0 < t0 <= t1");
    if (perDecade < 1) throw ConfigError("perDecade", "perDecade must be positive");
    std::vector<double> out;
    if (includeZero) out.push_back(0.0);
    const double decades = std::log10(t1 / t0);
    const long steps = std::max<long>(1, std::lround(std::ceil(decades * perDecade)));
    for (long i = 0; i <= steps; ++i) out.push_back(t0 * std::pow(t1 / t0, static_cast<double>(i) / steps));
    return out;
}

}  // namespace dh
