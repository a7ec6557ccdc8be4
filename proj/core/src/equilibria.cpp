#include "sislab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "sislab/banded.hpp"
#include "sislab/dfe.hpp"
#include "sislab/error.hpp"

namespace sislab {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

// |A| |u| row by row, the magnitude of the transport terms
Field transport_magnitude(const TridiagonalOperator& A, std::span<const double> u) {
    const std::size_t n = u.size();
    Field out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::abs(A.diag[i] * u[i]);
        if (i > 0) v += std::abs(A.lower[i] * u[i - 1]);
        if (i + 1 < n) v += std::abs(A.upper[i] * u[i + 1]);
        out[i] = v;
    }
    return out;
}

double incidence(double beta, double S, double I, double m) { return beta * S * I / (1.0 + m * I); }

struct CoupledEval {
    Field G;      // interleaved: (A_S + mu) S - Lambda + f - gamma I, (A_I + gamma) I - f
    Field scale;  // row magnitudes
};

// Relative size below which a value or row carries no usable precision.
constexpr double kNegligible = 1e-200;

// Rows whose magnitude is negligible against the largest are measured against that floor.
void floor_scale(Field& scale) {
    const double floor = std::max(kNegligible * max_value(scale), std::numeric_limits<double>::min());
    for (double& s : scale) s = std::max(s, floor);
}

// u - t step; nodes already below the floor may shrink by at most half, so
// underflowing tails do not block the positivity line search.
double trial_value(double u, double step, double t, double floor) {
    const double v = u - t * step;
    return u < floor ? std::max(v, 0.5 * u) : v;
}

CoupledEval coupled_eval(const CoefficientSet& cs, const Mesh& mesh, const SampledCoefficients& c,
                         const TridiagonalOperator& AS, const TridiagonalOperator& AI,
                         std::span<const double> S, std::span<const double> I) {
    const std::size_t n = mesh.size();
    Field f(n), rs(n), ri(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = incidence(c.beta[i], S[i], I[i], cs.m);
        rs[i] = c.Lambda[i] - f[i] + c.gamma[i] * I[i];
        ri[i] = f[i];
    }
    const Field es = flux_form_residual(mesh, cs.dS, cs.q, c.mu, S, rs);
    const Field ei = flux_form_residual(mesh, cs.dI, cs.q, c.gamma, I, ri);
    const Field ms = transport_magnitude(AS, S);
    const Field mi = transport_magnitude(AI, I);
    CoupledEval e;
    e.G.resize(2 * n);
    e.scale.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        e.G[2 * i] = -es[i];
        e.G[2 * i + 1] = -ei[i];
        e.scale[2 * i] = ms[i] + c.mu[i] * S[i] + c.Lambda[i] + f[i] + c.gamma[i] * I[i];
        e.scale[2 * i + 1] = mi[i] + c.gamma[i] * I[i] + f[i];
    }
    floor_scale(e.scale);
    return e;
}

// Residual below tolerance and a last step small enough that the error left after it is below tol too.
bool settled(double residual, double last_step, const NewtonOptions& opts) {
    return residual <= opts.tol && last_step <= std::sqrt(opts.tol);
}

double scaled_sup(std::span<const double> G, std::span<const double> scale) {
    double r = 0.0;
    for (std::size_t i = 0; i < G.size(); ++i) r = std::max(r, std::abs(G[i]) / scale[i]);
    return r;
}

double scaled_norm2(std::span<const double> G, std::span<const double> scale) {
    double r = 0.0;
    for (std::size_t i = 0; i < G.size(); ++i) r += (G[i] / scale[i]) * (G[i] / scale[i]);
    return std::sqrt(r);
}

// Scalar steady problem (A + sink) u - R(u) + [boundary term at the last cell] = 0.
struct ScalarProblem {
    double d = 1.0;
    double q = 0.0;
    Field sink;
    std::function<double(std::size_t, double)> R;
    std::function<double(std::size_t, double)> dR;
    // downstream flux d u' - q u = B(u) at x = L
    std::function<double(double)> B;
    std::function<double(double)> dB;
    // bound on dR; when set, monotone iteration brings u near the solution first
    Field shift;
};

struct ScalarEval {
    Field G;
    Field scale;
};

ScalarEval scalar_eval(const Mesh& mesh, const ScalarProblem& p, const TridiagonalOperator& A,
                       std::span<const double> u) {
    const std::size_t n = u.size();
    Field r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = p.R(i, u[i]);
    const Field e = flux_form_residual(mesh, p.d, p.q, p.sink, u, r);
    const Field mag = transport_magnitude(A, u);
    ScalarEval out;
    out.G.resize(n);
    out.scale.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.G[i] = -e[i];
        out.scale[i] = mag[i] + std::abs(p.sink[i] * u[i]) + std::abs(r[i]);
    }
    if (p.B) {
        const double b = p.B(u[n - 1]) / mesh.widths[n - 1];
        out.G[n - 1] -= b;
        out.scale[n - 1] += std::abs(b);
    }
    floor_scale(out.scale);
    return out;
}

// (A + sink + K) u_new = R(u) + K u. With K >= dR the map is order preserving,
// so from a sub- or supersolution the iterates move monotonically to the
// nearest solution and cannot fall onto the zero branch.
void monotone_phase(const Mesh& mesh, const ScalarProblem& p, Field& u) {
    constexpr int kMaxSweeps = 5000;
    constexpr double kHandOver = 1e-8;
    const std::size_t n = mesh.size();
    Field pot(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) pot[i] = p.sink[i] + p.shift[i];
    const TridiagonalOperator A = assemble_operator(mesh, p.d, p.q, pot);
    for (int k = 0; k < kMaxSweeps; ++k) {
        for (std::size_t i = 0; i < n; ++i) rhs[i] = p.R(i, u[i]) + p.shift[i] * u[i];
        Field next = solve_tridiagonal(A.lower, A.diag, A.upper, rhs);
        const double change = sup_distance(next, u) / sup_norm(next);
        u = std::move(next);
        if (!(change > kHandOver)) return;
    }
}

EquilibriumResult scalar_newton(const Mesh& mesh, const ScalarProblem& p, Field u,
                                const NewtonOptions& opts) {
    const std::size_t n = mesh.size();
    const TridiagonalOperator A = assemble_operator(mesh, p.d, p.q);
    if (!p.shift.empty()) monotone_phase(mesh, p, u);
    EquilibriumResult res;
    ScalarEval ev = scalar_eval(mesh, p, A, u);
    res.residual = scaled_sup(ev.G, ev.scale);
    res.residual_history.push_back(res.residual);
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iterations && !settled(res.residual, last_step, opts); ++it) {
        BandedMatrix J(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            J.at(i, i) = A.diag[i] + p.sink[i] - p.dR(i, u[i]);
            if (i > 0) J.at(i, i - 1) = A.lower[i];
            if (i + 1 < n) J.at(i, i + 1) = A.upper[i];
        }
        if (p.dB) J.at(n - 1, n - 1) -= p.dB(u[n - 1]) / mesh.widths[n - 1];
        Field step = BandedLU(J).solve(ev.G);

        const double m0 = scaled_norm2(ev.G, ev.scale);
        double t = 1.0;
        Field trial(n);
        bool accepted = false;
        const double floor_u = kNegligible * max_value(u);
        for (int k = 0; k < kMaxHalvings; ++k, t *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = trial_value(u[i], step[i], t, floor_u);
            if (!all_positive(trial)) continue;
            const ScalarEval te = scalar_eval(mesh, p, A, trial);
            if (scaled_norm2(te.G, ev.scale) <= (1.0 - kArmijo * t) * m0 ||
                scaled_sup(te.G, te.scale) <= opts.tol) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            const double size = sup_norm(step) / sup_norm(u);
            if (settled(res.residual, size, opts)) {
                last_step = size;
                break;
            }
            throw SolverError("Newton line search failed");
        }
        last_step = t * sup_norm(step) / sup_norm(trial);
        u = trial;
        ev = scalar_eval(mesh, p, A, u);
        res.residual = scaled_sup(ev.G, ev.scale);
        res.residual_history.push_back(res.residual);
        res.newton_iterations = it;
    }
    if (!settled(res.residual, last_step, opts)) {
        throw SolverError("Newton did not converge in " + std::to_string(opts.max_iterations) +
                          " iterations (residual " + num(res.residual) + ")");
    }
    res.converged = true;
    res.I = std::move(u);
    return res;
}

double relative_variation(std::span<const double> v) {
    const double hi = max_value(v), lo = min_value(v);
    return (hi - lo) / std::max(std::abs(hi), std::abs(lo));
}

}  // namespace

double ee_residual(const CoefficientSet& cs, const Mesh& mesh, std::span<const double> S,
                   std::span<const double> I) {
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const TridiagonalOperator AS = assemble_operator(mesh, cs.dS, cs.q);
    const TridiagonalOperator AI = assemble_operator(mesh, cs.dI, cs.q);
    const CoupledEval e = coupled_eval(cs, mesh, c, AS, AI, S, I);
    return scaled_sup(e.G, e.scale);
}

double EstimateRatios::worst() const {
    double w = std::max({mass_S_low, mass_S_high, mass_I_high});
    if (ceiling_S) w = std::max(w, *ceiling_S);
    if (ceiling_I) w = std::max(w, *ceiling_I);
    return w;
}

EstimateRatios ee_estimates(const CoefficientSet& cs, const Mesh& mesh, std::span<const double> S,
                            std::span<const double> I) {
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const Extrema mu = extrema(cs.mu, mesh);
    const Extrema beta = extrema(cs.beta, mesh);
    const Extrema gamma = extrema(cs.gamma, mesh);
    const double source = integrate(mesh, c.Lambda);
    const double mass_S = integrate(mesh, S);
    const double mass_I = integrate(mesh, I);

    EstimateRatios r;
    r.mass_S_low = source / mu.f_star / mass_S;
    r.mass_S_high = mass_S / (source / mu.f_sub);
    r.mass_I_high = mass_I / (beta.f_star * source / (cs.m * mu.f_sub * gamma.f_sub));
    if (cs.q > 0.0) {
        const double q = cs.q, L = mesh.L;
        const double k = 1.0 + beta.f_star / (cs.m * mu.f_sub);
        const double zs = -std::expm1(-q * L / cs.dS);
        const double zi = -std::expm1(-q * L / cs.dI);
        double ws = 0.0, wi = 0.0;
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            const double x = mesh.centers[i];
            const double es = std::exp(-q * (L - x) / cs.dS);
            const double ei = std::exp(-q * (L - x) / cs.dI);
            const double bs = source / q * k * (1.0 - es) +
                              source * es / (cs.dS * zs) *
                                  (q / mu.f_sub + k * (L - cs.dS / q * zs));
            const double bi = source * beta.f_star / (q * cs.m * mu.f_sub) * (1.0 - ei) +
                              beta.f_star * source * ei / (cs.dI * cs.m * mu.f_sub * zi) *
                                  (q / gamma.f_sub + (L - cs.dI / q * zi));
            ws = std::max(ws, S[i] / bs);
            wi = std::max(wi, I[i] / bi);
        }
        r.ceiling_S = ws;
        r.ceiling_I = wi;
    }
    return r;
}

EquilibriumResult solve_ee(const CoefficientSet& cs, const Mesh& mesh,
                           const std::optional<StateField>& init, const NewtonOptions& opts) {
    validate(cs, mesh);
    const std::size_t n = mesh.size();
    const SampledCoefficients c = sample_coefficients(cs, mesh);

    Field S, I;
    if (init) {
        if (init->S.size() != n || init->I.size() != n) {
            throw ConfigError("initial state length does not match mesh");
        }
        S = init->S;
        I = init->I;
    } else {
        StateField s0;
        s0.S.resize(n);
        s0.I.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            s0.S[i] = c.Lambda[i] / c.mu[i];
            s0.I[i] = 0.1 * s0.S[i];
        }
        SimOptions so;
        so.dt = 0.02;
        so.t_end = 50.0;
        so.output_every = 50.0;
        const SimulationTrace tr = simulate(s0, cs, mesh, so);
        S = tr.final.S;
        I = tr.final.I;
    }
    if (!all_positive(S) || !all_positive(I)) throw ConfigError("Newton start must be positive");

    const TridiagonalOperator AS = assemble_operator(mesh, cs.dS, cs.q);
    const TridiagonalOperator AI = assemble_operator(mesh, cs.dI, cs.q);

    EquilibriumResult res;
    CoupledEval ev = coupled_eval(cs, mesh, c, AS, AI, S, I);
    res.residual = scaled_sup(ev.G, ev.scale);
    res.residual_history.push_back(res.residual);
    Field tS(n), tI(n);
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iterations && !settled(res.residual, last_step, opts); ++it) {
        BandedMatrix J(2 * n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t s = 2 * i, v = 2 * i + 1;
            const double den = 1.0 + cs.m * I[i];
            const double fS = c.beta[i] * I[i] / den;
            const double fI = c.beta[i] * S[i] / (den * den);
            J.at(s, s) = AS.diag[i] + c.mu[i] + fS;
            J.at(s, v) = fI - c.gamma[i];
            J.at(v, v) = AI.diag[i] + c.gamma[i] - fI;
            J.at(v, s) = -fS;
            if (i > 0) {
                J.at(s, s - 2) = AS.lower[i];
                J.at(v, v - 2) = AI.lower[i];
            }
            if (i + 1 < n) {
                J.at(s, s + 2) = AS.upper[i];
                J.at(v, v + 2) = AI.upper[i];
            }
        }
        // rows equilibrated by their magnitude so pivoting compares like with like
        Field g(2 * n);
        for (std::size_t r = 0; r < 2 * n; ++r) {
            const std::size_t lo = r >= 2 ? r - 2 : 0, hi = std::min(2 * n - 1, r + 2);
            for (std::size_t k = lo; k <= hi; ++k) J.at(r, k) /= ev.scale[r];
            g[r] = ev.G[r] / ev.scale[r];
        }
        const Field step = BandedLU(J).solve(g);

        const double m0 = scaled_norm2(ev.G, ev.scale);
        double t = 1.0;
        bool accepted = false;
        const double floor_S = kNegligible * max_value(S), floor_I = kNegligible * max_value(I);
        for (int k = 0; k < kMaxHalvings; ++k, t *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) {
                tS[i] = trial_value(S[i], step[2 * i], t, floor_S);
                tI[i] = trial_value(I[i], step[2 * i + 1], t, floor_I);
            }
            if (!all_positive(tS) || !all_positive(tI)) continue;
            const CoupledEval te = coupled_eval(cs, mesh, c, AS, AI, tS, tI);
            if (scaled_norm2(te.G, ev.scale) <= (1.0 - kArmijo * t) * m0 ||
                scaled_sup(te.G, te.scale) <= opts.tol) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // at rounding level no step can decrease the residual
            const double size = sup_norm(step) / std::max(sup_norm(S), sup_norm(I));
            if (settled(res.residual, size, opts)) {
                last_step = size;
                break;
            }
            throw SolverError("Newton line search failed");
        }
        last_step = t * sup_norm(step) / std::max(sup_norm(tS), sup_norm(tI));
        S = tS;
        I = tI;
        ev = coupled_eval(cs, mesh, c, AS, AI, S, I);
        res.residual = scaled_sup(ev.G, ev.scale);
        res.residual_history.push_back(res.residual);
        res.newton_iterations = it;
    }
    res.trivial_branch = max_value(I) <= 1e-8 * max_value(S);
    if (!settled(res.residual, last_step, opts)) {
        throw SolverError("Newton did not converge in " + std::to_string(opts.max_iterations) +
                          " iterations (residual " + num(res.residual) + ")");
    }
    res.converged = true;
    res.S = std::move(S);
    res.I = std::move(I);
    return res;
}

AnalyticEE analytic_ee_under_assumption(const CoefficientSet& cs, const Mesh& mesh) {
    validate(cs, mesh);
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const std::size_t n = mesh.size();
    Field ratio_s(n), ratio_i(n), excess(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mesh.centers[i];
        excess[i] = c.Lambda[i] * c.beta[i] - c.gamma[i] * c.mu[i];
        if (!(excess[i] > 0.0)) {
            throw HypothesisError("Lambda beta - gamma mu is not positive at x = " +
                                  num(x));
        }
        ratio_s[i] = c.Lambda[i] / c.mu[i] * std::exp(-cs.q * x / cs.dS);
        ratio_i[i] = excess[i] / (c.gamma[i] * c.mu[i]) * std::exp(-cs.q * x / cs.dI);
    }
    const double vs = relative_variation(ratio_s), vi = relative_variation(ratio_i);
    if (vs > 1e-10) {
        throw HypothesisError("Lambda/(mu e^{qx/dS}) is not constant (relative variation " +
                              num(vs) + ")");
    }
    if (vi > 1e-10) {
        throw HypothesisError("(Lambda beta - gamma mu)/(gamma mu e^{qx/dI}) is not constant "
                              "(relative variation " + num(vi) + ")");
    }
    AnalyticEE ee;
    ee.kappa = ratio_s[0];
    ee.r = ratio_i[0];
    ee.S.resize(n);
    ee.I.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ee.S[i] = c.Lambda[i] / c.mu[i];
        ee.I[i] = excess[i] / (cs.m * c.gamma[i] * c.mu[i]);
    }
    if (cs.m != 1.0) {
        ee.note = "infected level divided by m = " + num(cs.m) +
                  "; the undivided formula leaves a nonzero steady residual";
    }
    return ee;
}

EquilibriumResult solve_theta_star(const CoefficientSet& cs, const Mesh& mesh,
                                   const NewtonOptions& opts) {
    const DfeResult dfe = solve_dfe(cs, mesh);
    const ThresholdReport rep = compute_R0_with(cs, mesh, dfe.S_hat);
    if (!(rep.R0 > 1.0)) {
        throw HypothesisError("limit profile needs R0 > 1 (R0 = " + num(rep.R0) + ")");
    }
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    Field bs(mesh.size());
    for (std::size_t i = 0; i < bs.size(); ++i) bs[i] = c.beta[i] * dfe.S_hat[i];
    ScalarProblem p;
    p.d = cs.dI;
    p.q = cs.q;
    p.sink = c.gamma;
    p.R = [&](std::size_t i, double t) { return bs[i] * t / (1.0 + t); };
    p.dR = [&](std::size_t i, double t) { return bs[i] / ((1.0 + t) * (1.0 + t)); };
    p.shift = bs;
    EquilibriumResult r =
        scalar_newton(mesh, p, Field(mesh.size(), std::max(rep.R0 - 1.0, 0.1)), opts);
    r.S = dfe.S_hat;
    return r;
}

std::string to_string(LimitKind k) {
    switch (k) {
        case LimitKind::DsInfty: return "ds_infty";
        case LimitKind::DiInfty: return "di_infty";
        case LimitKind::DsZero: return "ds_zero";
    }
    return "";
}

LimitKind parse_limit_kind(std::string_view s) {
    if (s == "ds_infty") return LimitKind::DsInfty;
    if (s == "di_infty") return LimitKind::DiInfty;
    if (s == "ds_zero") return LimitKind::DsZero;
    throw ConfigError("limit kind must be ds_infty, di_infty or ds_zero, got \"" + std::string(s) +
                      "\"");
}

namespace {

EquilibriumResult limit_ds_infty(const CoefficientSet& cs, const Mesh& mesh,
                                 const NewtonOptions& opts, const std::optional<Field>& init_I) {
    const double r0s = compute_R0_star(cs, mesh);
    if (!(r0s > 1.0)) {
        throw HypothesisError("large-dS limit needs R0* > 1 (R0* = " + num(r0s) + ")");
    }
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const double level = integrate(mesh, c.Lambda) / integrate(mesh, c.mu);
    ScalarProblem p;
    p.d = cs.dI;
    p.q = cs.q;
    p.sink = c.gamma;
    const double m = cs.m;
    p.R = [&](std::size_t i, double u) { return incidence(c.beta[i], level, u, m); };
    p.dR = [&](std::size_t i, double u) { return c.beta[i] * level / ((1.0 + m * u) * (1.0 + m * u)); };
    p.shift.resize(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) p.shift[i] = c.beta[i] * level;
    Field start = init_I.value_or(Field(mesh.size(), std::max(r0s - 1.0, 0.1) / m));
    if (start.size() != mesh.size()) throw ConfigError("initial profile length does not match mesh");
    EquilibriumResult r = scalar_newton(mesh, p, std::move(start), opts);
    r.S.assign(mesh.size(), level);
    return r;
}

EquilibriumResult limit_di_infty(const CoefficientSet& cs, const Mesh& mesh,
                                 const NewtonOptions& opts) {
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const DfeResult dfe = solve_dfe(cs, mesh);
    Field bs(mesh.size());
    for (std::size_t i = 0; i < bs.size(); ++i) bs[i] = c.beta[i] * dfe.S_hat[i];
    const double gamma_total = integrate(mesh, c.gamma);
    if (!(integrate(mesh, bs) > gamma_total)) {
        throw HypothesisError("large-dI limit needs int beta S_hat > int gamma");
    }
    const std::size_t n = mesh.size();
    auto S_at = [&](double level) {
        Field sink(n), src(n);
        for (std::size_t i = 0; i < n; ++i) {
            sink[i] = c.mu[i] + c.beta[i] * level / (1.0 + cs.m * level);
            src[i] = c.Lambda[i] + c.gamma[i] * level;
        }
        const TridiagonalOperator A = assemble_operator(mesh, cs.dS, cs.q, sink);
        Field S = solve_tridiagonal(A.lower, A.diag, A.upper, src);
        for (int k = 0; k < 3; ++k) {
            const Field r = flux_form_residual(mesh, cs.dS, cs.q, sink, S, src);
            const Field d = solve_tridiagonal(A.lower, A.diag, A.upper, r);
            for (std::size_t i = 0; i < n; ++i) S[i] += d[i];
        }
        return S;
    };
    auto g = [&](double level) {
        const Field S = S_at(level);
        Field w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = c.beta[i] * S[i] / (1.0 + cs.m * level);
        return integrate(mesh, w) - gamma_total;
    };

    EquilibriumResult res;
    double lo = 0.0, hi = 1.0;
    double ghi = g(hi);
    for (int k = 0; ghi > 0.0; ++k) {
        if (k > 200) throw SolverError("large-dI limit: no sign change in the constraint");
        lo = hi;
        hi *= 2.0;
        ghi = g(hi);
    }
    // bisection to a narrow bracket, then secant polish
    for (int k = 0; k < 200 && hi - lo > 1e-8 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        res.residual_history.push_back(std::abs(gm) / gamma_total);
        (gm > 0.0 ? lo : hi) = mid;
    }
    double a = lo, ga = g(lo), b = hi, gb = g(hi);
    double x = std::abs(ga) < std::abs(gb) ? a : b;
    double gx = std::min(std::abs(ga), std::abs(gb));
    for (int k = 0; k < opts.max_iterations && gx > opts.tol * gamma_total && gb != ga; ++k) {
        const double xn = b - gb * (b - a) / (gb - ga);
        if (!(xn > lo && xn < hi)) break;
        a = b;
        ga = gb;
        b = xn;
        gb = g(xn);
        x = xn;
        gx = std::abs(gb);
        res.newton_iterations = k + 1;
        res.residual_history.push_back(gx / gamma_total);
    }
    res.residual = std::abs(g(x)) / gamma_total;
    if (!(res.residual <= std::max(opts.tol, 1e-9))) {
        throw SolverError("large-dI limit: constraint residual " + num(res.residual));
    }
    res.converged = true;
    res.S = S_at(x);
    res.I.assign(n, x);
    return res;
}

EquilibriumResult limit_ds_zero(const CoefficientSet& cs, const Mesh& mesh, BcVariant variant,
                                const LimitOptions& lo) {
    const NewtonOptions& opts = lo.newton;
    const SingularDfeResult sdfe = solve_dfe_singular(cs, mesh);
    const auto n0 = find_N0(cs, mesh, variant);
    if (n0 && !(sdfe.N_S > *n0)) {
        throw HypothesisError("small-dS limit needs N_S > N0 (N_S = " + num(sdfe.N_S) +
                              ", N0 = " + num(*n0) + ")");
    }
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const std::size_t n = mesh.size();
    const double m = cs.m;
    const double source = integrate(mesh, c.Lambda);
    double mass = sdfe.N_S;

    auto transport_S = [&](const Field& I) {
        Field S(n);
        double left = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double k = c.mu[i] + c.beta[i] * I[i] / (1.0 + m * I[i]);
            const double eq = (c.Lambda[i] + c.gamma[i] * I[i]) / k;
            const double rate = k / cs.q;
            S[i] = eq + (left - eq) * std::exp(-0.5 * rate * mesh.widths[i]);
            left = eq + (left - eq) * std::exp(-rate * mesh.widths[i]);
        }
        return S;
    };

    // start above the solution: Newton on this saturating problem is reliable from a supersolution
    double top = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        top = std::max(top, c.beta[i] * c.Lambda[i] / (c.mu[i] * c.gamma[i]));
    }
    Field I = lo.init_I.value_or(Field(n, 10.0 * top / m)), S;
    if (I.size() != n) throw ConfigError("initial profile length does not match mesh");
    EquilibriumResult res;
    NewtonOptions inner = opts;
    inner.tol = std::min(opts.tol, 1e-11);
    for (int k = 0; k < 500; ++k) {
        S = transport_S(I);
        if (lo.balanced_layer_mass) {
            mass = std::max(0.0, (source - integrate(mesh, S, c.mu)) / sdfe.mu_L);
        }
        const double coef = tau1_robin_coefficient(mass, cs, variant);
        ScalarProblem p;
        p.d = cs.dI;
        p.q = cs.q;
        p.sink = c.gamma;
        p.R = [&](std::size_t i, double u) { return incidence(c.beta[i], S[i], u, m); };
        p.dR = [&](std::size_t i, double u) { return c.beta[i] * S[i] / ((1.0 + m * u) * (1.0 + m * u)); };
        p.B = [&](double u) { return coef * u / (1.0 + m * u); };
        p.dB = [&](double u) { return coef / ((1.0 + m * u) * (1.0 + m * u)); };
        EquilibriumResult step = scalar_newton(mesh, p, I, inner);
        const double change = sup_distance(step.I, I) / sup_norm(step.I);
        I = std::move(step.I);
        res.newton_iterations += step.newton_iterations;
        res.residual_history.push_back(change);
        if (change <= 1e-9) {
            res.S = transport_S(I);
            res.I = I;
            res.residual = change;
            res.converged = true;
            res.boundary_mass = mass;
            return res;
        }
        const std::size_t h = res.residual_history.size();
        if (h > 20 && res.residual_history[h - 1] >= 0.999 * res.residual_history[h - 11]) {
            break;
        }
    }
    std::string hist;
    for (std::size_t k = res.residual_history.size() > 5 ? res.residual_history.size() - 5 : 0;
         k < res.residual_history.size(); ++k) {
        hist += " " + num(res.residual_history[k]);
    }
    throw SolverError("small-dS limit: fixed point stagnated, last changes" + hist);
}

}  // namespace

EquilibriumResult solve_limit_system(LimitKind kind, const CoefficientSet& cs, const Mesh& mesh,
                                     BcVariant variant, const LimitOptions& opts) {
    validate(cs, mesh);
    switch (kind) {
        case LimitKind::DsInfty: return limit_ds_infty(cs, mesh, opts.newton, opts.init_I);
        case LimitKind::DiInfty: return limit_di_infty(cs, mesh, opts.newton);
        case LimitKind::DsZero: return limit_ds_zero(cs, mesh, variant, opts);
    }
    throw ConfigError("unknown limit kind");
}

}  // namespace sislab
