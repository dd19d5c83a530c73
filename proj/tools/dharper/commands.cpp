#include "commands.hpp"

#include "dh/arith.hpp"
#include "dh/cocycle.hpp"
#include "dh/continuum.hpp"
#include "dh/dynamics.hpp"
#include "dh/greens.hpp"
#include "dh/spectra.hpp"
#include "dh/twod.hpp"

#include <cmath>
#include <memory>
#include <type_traits>

namespace dhcli {

using nlohmann::json;

namespace {

// CLI11 prints default doubles with six digits; the manifest wants them exact.
template <class T>
CLI::Option* add(CLI::App* app, const std::string& name, T& value, const std::string& desc) {
    CLI::Option* o = app->add_option(name, value, desc);
    if constexpr (std::is_floating_point_v<T>) o->default_str(format_double(value));
    return o;
}

void model_options(CLI::App* s, dh::ModelParams& p) {
    add(s, "--w0", p.w0, "anti-chiral coupling");
    add(s, "--w1", p.w1, "chiral coupling");
    add(s, "--alpha", p.alpha, "inverse moire length 1/L in [0, 1)");
    add(s, "--theta", p.theta, "transverse quasimomentum");
    add(s, "--phi", p.phi, "A/B dislocation offset");
    add(s, "--vartheta", p.vartheta, "phase offset");
}

dh::Boundary parse_boundary(const std::string& s) {
    if (s == "minus") return dh::Boundary::minus;
    if (s == "plus") return dh::Boundary::plus;
    throw dh::ConfigError("boundary", "boundary must be minus or plus");
}

dh::Window window_of(long n1, long n2) {
    if (n2 < n1) throw dh::ConfigError("n2", "window must satisfy n1 <= n2");
    return {n1, n2};
}

json complex_json(dh::cplx z) { return json::array({z.real(), z.imag()}); }

template <class T>
std::shared_ptr<T> state() {
    return std::make_shared<T>();
}

Command butterfly_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        long qmax = 40;
        int bloch = 8;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("butterfly", "Floquet spectra over all p/q with q <= qmax");
    model_options(sub, s->p);
    add(sub, "--qmax", s->qmax, "largest denominator");
    add(sub, "--bloch", s->bloch, "Bloch points per band");
    return {"butterfly", sub, [s](Job& job) {
                if (s->qmax < 1) throw dh::ConfigError("qmax", "qmax must be positive");
                if (s->bloch < 1) throw dh::ConfigError("bloch", "bloch must be positive");
                const auto sets = dh::butterfly(s->p.validated(), s->qmax, s->bloch, {s->p.theta});
                // k is the per-site Bloch phase; theta is recorded in the manifest.
                Table t{{"p", "q", "alpha", "k", "energy"}, {}};
                for (const auto& set : sets)
                    for (std::size_t i = 0; i < set.energies.size(); ++i)
                        t.add({static_cast<long long>(set.p), static_cast<long long>(set.q), set.alpha,
                               set.blochGrid[static_cast<std::size_t>(set.kIndex[i])], set.energies[i]});
                job.table("butterfly", t);
            }};
}

Command spectrum_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        long n1 = 0, n2 = 99;
        std::string boundary = "minus";
        long eigenfunction = -1;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("spectrum", "eigenvalues of a finite truncation");
    model_options(sub, s->p);
    add(sub, "--n1", s->n1, "first site");
    add(sub, "--n2", s->n2, "last site");
    add(sub, "--boundary", s->boundary, "minus or plus truncation");
    add(sub, "--eigenfunction", s->eigenfunction, "also write eigenvector j (0-based, minus only)");
    return {"spectrum", sub, [s](Job& job) {
                const auto w = window_of(s->n1, s->n2);
                const auto b = parse_boundary(s->boundary);
                const auto h = dh::build_finite(s->p.validated(), w, b);
                const bool vec = s->eigenfunction >= 0;
                if (vec && b != dh::Boundary::minus)
                    throw dh::ConfigError("eigenfunction", "eigenfunctions are written for minus truncations only");
                if (vec && s->eigenfunction >= h.dim())
                    throw dh::ConfigError("eigenfunction", "eigenvector index out of range");
                const auto e = dh::eigh(h.entries, vec);
                Table t{{"index", "energy"}, {}};
                for (Eigen::Index i = 0; i < e.values.size(); ++i) t.add({static_cast<long long>(i), e.values(i)});
                job.table("spectrum", t);
                if (vec) {
                    Table f{{"site", "abs1", "abs2", "abs3", "abs4", "prob", "log10_prob"}, {}};
                    const auto v = e.vectors.col(s->eigenfunction);
                    for (long n = w.n1; n <= w.n2; ++n) {
                        std::array<double, 4> a{};
                        double pr = 0.0;
                        for (int c = 0; c < 4; ++c) {
                            a[c] = std::abs(v(4 * (n - w.n1) + c));
                            pr += a[c] * a[c];
                        }
                        f.add({static_cast<long long>(n), a[0], a[1], a[2], a[3], pr, std::log10(std::max(pr, 1e-300))});
                    }
                    job.table("eigenfunction", f);
                }
            }};
}

Command dos_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        long N = 200;
        int samples = 16;
        int bins = 64;
        double lo = NAN, hi = NAN;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("dos", "eigenvalue histogram averaged over vartheta");
    model_options(sub, s->p);
    add(sub, "--N", s->N, "sites per truncation");
    add(sub, "--samples", s->samples, "vartheta samples");
    add(sub, "--bins", s->bins, "histogram bins");
    add(sub, "--lo", s->lo, "lower edge (default: below the spectrum)");
    add(sub, "--hi", s->hi, "upper edge (default: above the spectrum)");
    return {"dos", sub, [s](Job& job) {
                const auto p = s->p.validated();
                const double r = 3.0 + std::abs(p.w0) + std::abs(p.w1) + 1.0;
                const double lo = std::isnan(s->lo) ? -r : s->lo, hi = std::isnan(s->hi) ? r : s->hi;
                job.parameters()["lo"] = lo;
                job.parameters()["hi"] = hi;
                const auto d = dh::dos(p, s->N, s->samples, s->bins, lo, hi);
                Table t{{"bin_lo", "bin_hi", "mass"}, {}};
                for (std::size_t i = 0; i < d.mass.size(); ++i) t.add({d.edges[i], d.edges[i + 1], d.mass[i]});
                job.table("dos", t);
            }};
}

Command lyapunov_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        double energy = 0.0, epsilon = 0.0;
        dh::LyapunovOptions opt;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("lyapunov", "the eight Lyapunov exponents of the transfer cocycle");
    model_options(sub, s->p);
    add(sub, "--energy", s->energy, "energy");
    add(sub, "--epsilon", s->epsilon, "imaginary phase shift");
    add(sub, "--iterates", s->opt.iterates, "cocycle steps per phase");
    add(sub, "--phases", s->opt.phaseSamples, "phase samples");
    add(sub, "--burn-in", s->opt.burnIn, "discarded steps");
    return {"lyapunov", sub, [s](Job& job) {
                dh::TransferCocycle c{s->p.validated(), s->energy, s->epsilon};
                const auto l = s->epsilon != 0.0 ? dh::lyapunov_complexified(c, s->opt) : dh::lyapunov(c, s->opt);
                Table t{{"index", "exponent", "stderr"}, {}};
                for (int i = 0; i < 8; ++i) t.add({static_cast<long long>(i + 1), l.exponents[i], l.stderrs[i]});
                job.table("lyapunov", t);
                job.report("lyapunov_summary", {{"gamma4", l.partial_sum(4)},
                                                {"stderr", l.stderr},
                                                {"converged", l.converged},
                                                {"iterates", l.iterates},
                                                {"phase_samples", l.phaseSamples}});
            }};
}

Command thouless_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        double energy = 0.0;
        long N = 2000;
        int samples = 32;
        dh::LyapunovOptions opt;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("thouless", "gamma^4 from the cocycle against (1/N) log|det(H - E)|");
    model_options(sub, s->p);
    add(sub, "--energy", s->energy, "energy");
    add(sub, "--N", s->N, "window length");
    add(sub, "--samples", s->samples, "vartheta samples");
    add(sub, "--iterates", s->opt.iterates, "cocycle steps per phase");
    return {"thouless", sub, [s](Job& job) {
                const auto r = dh::thouless_check(s->p.validated(), s->energy, s->N, s->samples, s->opt);
                Table t{{"sample", "vartheta", "u_N"}, {}};
                for (std::size_t j = 0; j < r.perSample.size(); ++j)
                    t.add({static_cast<long long>(j), (j + 0.5) / s->samples, r.perSample[j]});
                job.table("thouless", t);
                job.report("thouless_summary", {{"gamma4_cocycle", r.gamma4Cocycle},
                                                {"gamma4_determinant", r.gamma4Determinant},
                                                {"gap", r.gap},
                                                {"lower_bound_fraction", r.lowerBoundFraction},
                                                {"skipped", r.skipped},
                                                {"samples", r.samples}});
            }};
}

Command green_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        double energy = 0.0;
        long n1 = 0, n2 = 59;
        std::string boundary = "minus";
        int kleinSamples = 0;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("green-decay", "decay envelope of the finite-volume Green's function");
    model_options(sub, s->p);
    add(sub, "--energy", s->energy, "energy");
    add(sub, "--n1", s->n1, "first site");
    add(sub, "--n2", s->n2, "last site");
    add(sub, "--boundary", s->boundary, "minus or plus truncation");
    add(sub, "--klein-samples", s->kleinSamples, "random phases for the envelope constant (0: skip)");
    return {"green-decay", sub, [s](Job& job) {
                const auto p = s->p.validated();
                const auto w = window_of(s->n1, s->n2);
                const auto g = dh::green(p, w, parse_boundary(s->boundary), s->energy);
                const auto prof = dh::decay_profile(g);
                Table t{{"distance", "log_envelope"}, {}};
                for (std::size_t d = 0; d < prof.logEnvelope.size(); ++d)
                    t.add({static_cast<long long>(d), prof.logEnvelope[d]});
                job.table("green_decay", t);
                json r = {{"slope", prof.slope}};
                if (s->kleinSamples > 0) {
                    const auto k = dh::klein_fit(p, s->energy, w.size(), s->kleinSamples,
                                                 job.parameters().at("seed").get<unsigned>());
                    r["klein_constant"] = std::isfinite(k.constant) ? json(k.constant) : json(nullptr);
                    if (!std::isfinite(k.constant)) r["klein_note"] = "every sampled minor was singular";
                    r["klein_samples"] = k.samples;
                }
                job.report("green_decay_summary", r);
            }};
}

Command regularity_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        double energy = 0.0, gamma = 0.01;
        long site = 0, k = 40;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("regularity", "(gamma, k)-regular / singular classification of a site");
    model_options(sub, s->p);
    add(sub, "--energy", s->energy, "energy");
    add(sub, "--site", s->site, "site n");
    add(sub, "--gamma", s->gamma, "decay rate per component index");
    add(sub, "--k", s->k, "window length");
    return {"regularity", sub, [s](Job& job) {
                const auto r = dh::regularity_classify(s->p.validated(), s->energy, s->site, s->gamma, s->k);
                const bool reg = r.verdict == dh::Verdict::regular;
                json j = {{"site", r.site},
                          {"gamma", r.gamma},
                          {"k", r.k},
                          {"verdict", reg ? "regular" : "singular"},
                          {"windows_tried", r.windowsTried}};
                j["witness"] = reg ? json::array({r.witness.n1, r.witness.n2}) : json(nullptr);
                job.report("regularity", j);
            }};
}

Command charpoly_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        double energy = 0.0;
        long N = 12;
        int grid = 64;
    };
    auto s = state<S>();
    s->p.phi = 0.25;
    auto* sub = app.add_subcommand("charpoly", "characteristic polynomials of the plain-cosine model");
    model_options(sub, s->p);
    add(sub, "--energy", s->energy, "energy");
    add(sub, "--N", s->N, "window length");
    add(sub, "--grid", s->grid, "vartheta grid points");
    return {"charpoly", sub, [s](Job& job) {
                const auto p = s->p.validated();
                if (s->grid < 2) throw dh::ConfigError("grid", "grid must have at least two points");
                std::vector<double> grid(s->grid);
                for (int i = 0; i < s->grid; ++i) grid[i] = static_cast<double>(i) / s->grid;
                const auto d = dh::charpoly_symmetries(p, s->N, s->energy, grid);
                Table t{{"vartheta", "p_minus", "p_plus"}, {}};
                for (double v : grid) {
                    dh::ModelParams q = p;
                    q.vartheta = v;
                    t.add({v, dh::charpoly(q, {0, s->N - 1}, dh::Boundary::minus, s->energy),
                           dh::charpoly(q, {0, s->N - 1}, dh::Boundary::plus, s->energy)});
                }
                job.table("charpoly", t);
                job.report("charpoly_defects", {{"evenness", d.evenness},
                                                {"half_period", d.halfPeriod},
                                                {"shift", d.shift},
                                                {"translation", d.translation},
                                                {"fourier_high", d.fourierHigh},
                                                {"fourier_odd", d.fourierOdd},
                                                {"fourier_sine", d.fourierSine}});
            }};
}

Command evolve_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        long n1 = -200, n2 = 200, center = 0;
        double sigma = std::sqrt(70.0), tmax = 100.0;
        int component = 1, frames = 51;
        std::string packet = "gaussian";
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("evolve", "wavepacket evolution on a minus truncation");
    model_options(sub, s->p);
    add(sub, "--n1", s->n1, "first site");
    add(sub, "--n2", s->n2, "last site");
    add(sub, "--packet", s->packet, "gaussian or site");
    add(sub, "--sigma", s->sigma, "Gaussian width in sites");
    add(sub, "--center", s->center, "initial centre site");
    add(sub, "--component", s->component, "initial internal component 1..4");
    add(sub, "--tmax", s->tmax, "final time");
    add(sub, "--frames", s->frames, "equally spaced times in [0, tmax]");
    return {"evolve", sub, [s](Job& job) {
                const auto w = window_of(s->n1, s->n2);
                if (s->frames < 2) throw dh::ConfigError("frames", "frames must be at least 2");
                dh::WavepacketState psi0;
                if (s->packet == "gaussian")
                    psi0 = dh::gaussian_packet(s->sigma, s->center, s->component, w);
                else if (s->packet == "site")
                    psi0 = dh::site_packet(s->center, s->component, w);
                else
                    throw dh::ConfigError("packet", "packet must be gaussian or site");
                std::vector<double> times(s->frames);
                for (int i = 0; i < s->frames; ++i) times[i] = s->tmax * i / (s->frames - 1);
                const auto states = dh::evolve(s->p.validated(), psi0, times);
                Table heat{{"time", "site", "component", "prob"}, {}};
                Table lay{{"time", "mass1", "mass2", "mass3", "mass4", "second_moment", "participation"}, {}};
                const auto trace = dh::layer_trace(states);
                for (std::size_t f = 0; f < states.size(); ++f) {
                    const auto& st = states[f];
                    for (long n = w.n1; n <= w.n2; ++n)
                        for (int c = 0; c < 4; ++c)
                            heat.add({st.time, static_cast<long long>(n), static_cast<long long>(c + 1),
                                      std::norm(st.amplitudes(4 * (n - w.n1) + c))});
                    lay.add({st.time, trace[f][0], trace[f][1], trace[f][2], trace[f][3], dh::second_moment(st),
                             dh::participation_ratio(st)});
                }
                job.table("evolve", heat);
                job.table("evolve_moments", lay);
            }};
}

Command dynloc_cmd(CLI::App& app) {
    struct S {
        dh::ModelParams p;
        long n1 = -200, n2 = 199, center = 0;
        int component = 1, perDecade = 64;
        double t0 = 1.0, t1 = 1000.0;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("dynloc", "sup over time of the weighted moment of a site packet");
    model_options(sub, s->p);
    add(sub, "--n1", s->n1, "first site");
    add(sub, "--n2", s->n2, "last site");
    add(sub, "--center", s->center, "initial site");
    add(sub, "--component", s->component, "initial component 1..4");
    add(sub, "--t0", s->t0, "first positive time");
    add(sub, "--t1", s->t1, "last time");
    add(sub, "--per-decade", s->perDecade, "geometric grid density");
    return {"dynloc", sub, [s](Job& job) {
                const auto w = window_of(s->n1, s->n2);
                const auto grid = dh::geometric_time_grid(s->t0, s->t1, s->perDecade, true);
                const auto r = dh::dynloc_moment(s->p.validated(), dh::site_packet(s->center, s->component, w), grid);
                Table t{{"time", "moment"}, {}};
                for (std::size_t i = 0; i < r.times.size(); ++i) t.add({r.times[i], r.moments[i]});
                job.table("dynloc", t);
                job.report("dynloc_summary", {{"supremum", r.supremum}, {"points", r.times.size()}});
            }};
}

Command continuum_cmd(CLI::App& app) {
    struct S {
        dh::ContinuumParams c;
        int kpoints = 64;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("continuum-bands", "Bloch bands of the continuum model over one Brillouin zone");
    add(sub, "--w0", s->c.w0, "anti-chiral coupling");
    add(sub, "--w1", s->c.w1, "chiral coupling");
    add(sub, "--L", s->c.L, "period");
    add(sub, "--kPerp", s->c.kPerp, "transverse momentum");
    add(sub, "--nModes", s->c.nModes, "Fourier modes -nModes..nModes");
    add(sub, "--kpoints", s->kpoints, "k_x grid points on [0, 2 pi / L]");
    return {"continuum-bands", sub, [s](Job& job) {
                const auto c = s->c.validated();
                const auto r = dh::flat_band_scan_continuum(c, dh::brillouin_grid(c.L, s->kpoints), c.kPerp);
                Table t{{"kx", "branch", "energy"}, {}};
                for (std::size_t i = 0; i < r.kx.size(); ++i)
                    for (Eigen::Index b = 0; b < r.energies[i].size(); ++b)
                        t.add({r.kx[i], static_cast<long long>(b), r.energies[i](b)});
                job.table("continuum_bands", t);
                job.report("continuum_widths", {{"min_width", r.widths.minCoeff()},
                                                {"flat_count", r.flatCount},
                                                {"flat_tolerance", r.flatTol},
                                                {"near_crossings", r.nearCrossings},
                                                {"branch_tracking", "sorted index"}});
            }};
}

Command monodromy_cmd(CLI::App& app) {
    struct S {
        double w1 = 0.1;
        int steps = 4096;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("monodromy", "period map of the chiral zero-energy equation");
    add(sub, "--w1", s->w1, "chiral coupling");
    add(sub, "--steps", s->steps, "RK4 steps per period (checked against twice as many)");
    return {"monodromy", sub, [s](Job& job) {
                const auto m = dh::chiral_monodromy(s->w1, s->steps);
                const auto z = dh::zero_energy_chiral(s->w1, {s->steps, 2 * s->steps});
                const double ratio = s->w1 != 0.0 ? (m.trace.real() - 2.0) / (s->w1 * s->w1) : NAN;
                Table t{{"w1", "det_defect", "trace_re", "trace_im", "trace_ratio"}, {}};
                t.add({m.w1, m.detDefect, m.trace.real(), m.trace.imag(), ratio});
                job.table("monodromy", t);
                json mat = json::array();
                for (int i = 0; i < 2; ++i)
                    mat.push_back(json::array({complex_json(m.matrix(i, 0)), complex_json(m.matrix(i, 1))}));
                job.report("monodromy_report",
                           {{"w1", m.w1},
                            {"h", m.h},
                            {"matrix", mat},
                            {"det_defect", m.detDefect},
                            {"trace", complex_json(m.trace)},
                            {"trace_ratio", std::isnan(ratio) ? json(nullptr) : json(ratio)},
                            {"halving_error", m.halvingError},
                            {"in_spectrum_globally", z.inSpectrumGlobally},
                            {"excluded_at_kx_zero", z.excludedAtKxZero},
                            {"real_quasimomentum", z.realQuasimomentum},
                            {"rho", {complex_json(z.rho[0]), complex_json(z.rho[1])}},
                            {"mu", {complex_json(z.mu[0]), complex_json(z.mu[1])}},
                            {"integration_error", z.integrationError}});
            }};
}

Command arith_cmd(CLI::App& app) {
    struct S {
        double alpha = 0.6180339887498949;
        int depth = 40;
        long kmax = 10000;
        double t = 1e-3, exponent = 2.0;
    };
    auto s = state<S>();
    auto* sub = app.add_subcommand("arith-classify", "continued fraction and Diophantine margin of alpha");
    add(sub, "--alpha", s->alpha, "inverse moire length in (0, 1)");
    add(sub, "--depth", s->depth, "maximal continued-fraction depth");
    add(sub, "--kmax", s->kmax, "largest k in the Diophantine scan");
    add(sub, "--t", s->t, "Diophantine constant t");
    add(sub, "--exponent", s->exponent, "exponent of |k| in the condition");
    return {"arith-classify", sub, [s](Job& job) {
                const auto cf = dh::convergents(s->alpha, s->depth);
                Table t{{"k", "a_k", "p_k", "q_k", "error"}, {}};
                for (std::size_t k = 0; k < cf.convergents.size(); ++k) {
                    const auto& c = cf.convergents[k];
                    t.add({static_cast<long long>(k + 1), cf.quotients[k], c.p, c.q,
                           std::abs(s->alpha - static_cast<double>(c.p) / static_cast<double>(c.q))});
                }
                job.table("convergents", t);
                std::string cls, note;
                json margin = nullptr;
                if (cf.rational) {
                    cls = "rational";
                    note = "periodic operator: band spectrum, no point spectrum";
                } else {
                    const auto m = dh::diophantine_margin(s->alpha, s->kmax, s->exponent);
                    margin = {{"k", m.k}, {"value", m.margin}};
                    cls = m.passes(s->t) ? "diophantine" : "liouville-like";
                    note = m.passes(s->t) ? "localisation results for strong coupling apply"
                                          : "close rational approximants: the no-point-spectrum argument may apply";
                }
                job.report("arith_classification",
                           {{"alpha", s->alpha},
                            {"classification", cls},
                            {"spectral_note", note},
                            {"margin", margin},
                            {"t", s->t},
                            {"kmax", s->kmax},
                            {"depth", cf.depth},
                            {"expansion_note", cf.note},
                            {"confidence", "finite precision: checked up to kmax and the computed depth only"}});
            }};
}

Command twod_cmd(CLI::App& app) {
    struct S {
        dh::TwoDParams p;
        std::string potential = "product";
    };
    auto s = state<S>();
    s->p.window = {0, 11, 0, 9};
    auto* sub = app.add_subcommand("twod-blockdiag", "sitewise block diagonalisation of the 2D model");
    add(sub, "--w", s->p.w, "coupling");
    add(sub, "--alpha1", s->p.alpha1, "1/L_1");
    add(sub, "--alpha2", s->p.alpha2, "1/L_2");
    add(sub, "--x1", s->p.window.x1, "first n_1");
    add(sub, "--x2", s->p.window.x2, "last n_1");
    add(sub, "--y1", s->p.window.y1, "first n_2");
    add(sub, "--y2", s->p.window.y2, "last n_2");
    add(sub, "--potential", s->potential, "product or sum of offset + cos factors");
    add(sub, "--offset1", s->p.potential.offset1, "offset of the first factor");
    add(sub, "--offset2", s->p.potential.offset2, "offset of the second factor");
    return {"twod-blockdiag", sub, [s](Job& job) {
                dh::TwoDParams p = s->p;
                if (s->potential == "product")
                    p.potential.kind = dh::TwoDPotential::Kind::separable_product;
                else if (s->potential == "sum")
                    p.potential.kind = dh::TwoDPotential::Kind::separable_sum;
                else
                    throw dh::ConfigError("potential", "potential must be product or sum");
                const auto r = dh::block_diag_2d(p);
                const auto m = dh::minkowski_check(p);
                Table t{{"index", "energy", "minkowski_sum"}, {}};
                for (Eigen::Index i = 0; i < m.twoD.size(); ++i)
                    t.add({static_cast<long long>(i), m.twoD(i), m.sums(i)});
                job.table("twod_spectrum", t);
                job.report("twod_blockdiag", {{"off_block_residual", r.offBlockResidual},
                                              {"conjugation_defect", r.conjugationDefect},
                                              {"spectrum_defect", r.spectrumDefect},
                                              {"sign_changes", r.signChanges},
                                              {"minkowski_defect", m.defect},
                                              {"sgn_zero", 1}});
            }};
}

}  // namespace

std::vector<Command> add_commands(CLI::App& app) {
    return {butterfly_cmd(app), spectrum_cmd(app),  dos_cmd(app),       lyapunov_cmd(app), thouless_cmd(app),
            green_cmd(app),     regularity_cmd(app), charpoly_cmd(app), evolve_cmd(app),   dynloc_cmd(app),
            continuum_cmd(app), monodromy_cmd(app), arith_cmd(app),     twod_cmd(app)};
}

}  // namespace dhcli
