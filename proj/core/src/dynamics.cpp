#include "sislab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sislab/banded.hpp"
#include "sislab/error.hpp"

namespace sislab {

namespace {

constexpr int kRestoreAfter = 10;
constexpr int kRefineSteps = 2;

// (1/h + c - transport) u = rhs with zero-flux ends
class ImplicitBlock {
public:
    ImplicitBlock(const Mesh& mesh, double d, double q, const Field& sink)
        : mesh_(mesh), d_(d), q_(q), sink_(sink) {}

    Field solve(double h, std::span<const double> rhs) {
        if (h != h_) {
            h_ = h;
            pot_ = sink_;
            for (double& v : pot_) v += 1.0 / h;
            op_ = assemble_operator(mesh_, d_, q_, pot_);
        }
        Field u = solve_tridiagonal(op_.lower, op_.diag, op_.upper, rhs);
        for (int k = 0; k < kRefineSteps; ++k) {
            const Field r = flux_form_residual(mesh_, d_, q_, pot_, u, rhs);
            const Field c = solve_tridiagonal(op_.lower, op_.diag, op_.upper, r);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] += c[i];
        }
        return u;
    }

private:
    const Mesh& mesh_;
    double d_, q_;
    Field sink_;
    double h_ = std::numeric_limits<double>::quiet_NaN();
    Field pot_;
    TridiagonalOperator op_;
};

bool finite(std::span<const double> u) {
    return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
}

TraceSample sample(const StateField& s, const CoefficientSet& cs, const Mesh& mesh,
                   const SimOptions& opts) {
    TraceSample ts;
    ts.t = s.t;
    ts.mass_S = integrate(mesh, s.S);
    ts.mass_I = integrate(mesh, s.I);
    ts.min_S = min_value(s.S);
    ts.min_I = min_value(s.I);
    for (std::size_t i = 0; i < s.S.size(); ++i) ts.max_sum = std::max(ts.max_sum, s.S[i] + s.I[i]);
    if (opts.reference) {
        ts.F = lyapunov_F(s, cs, mesh, *opts.reference);
        ts.ref_distance =
            std::max(sup_distance(s.S, opts.reference->S), sup_distance(s.I, opts.reference->I));
    } else {
        ts.F = std::numeric_limits<double>::quiet_NaN();
        ts.ref_distance = std::numeric_limits<double>::quiet_NaN();
    }
    return ts;
}

}  // namespace

StateField initial_state(const CoeffExpr& S0, const CoeffExpr& I0, const Mesh& mesh) {
    StateField s;
    s.S = sample_positive(S0, mesh, "initial S");
    s.I = sample_positive(I0, mesh, "initial I");
    return s;
}

SimulationTrace simulate(const StateField& init, const CoefficientSet& cs, const Mesh& mesh,
                         const SimOptions& opts) {
    validate(cs, mesh);
    const std::size_t n = mesh.size();
    if (init.S.size() != n || init.I.size() != n) {
        throw ConfigError("initial state length does not match mesh");
    }
    if (!(opts.dt > 0.0) || !(opts.t_end > opts.dt) || !(opts.output_every > 0.0)) {
        throw ConfigError("time options need 0 < dt < t_end and output_every > 0");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(init.S[i] >= 0.0) || !(init.I[i] >= 0.0)) {
            throw ConfigError("initial state must be nonnegative");
        }
    }
    if (!(max_value(init.S) > 0.0) || !(max_value(init.I) > 0.0)) {
        throw ConfigError("initial state must not vanish identically");
    }
    if (opts.reference && (opts.reference->S.size() != n || opts.reference->I.size() != n)) {
        throw ConfigError("reference state length does not match mesh");
    }

    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const double total_source = integrate(mesh, c.Lambda);
    ImplicitBlock infected(mesh, cs.dI, cs.q, c.gamma);
    ImplicitBlock susceptible(mesh, cs.dS, cs.q, c.mu);

    SimulationTrace tr;
    tr.initial = init;
    tr.initial.t = 0.0;
    StateField s = tr.initial;
    tr.samples.push_back(sample(s, cs, mesh, opts));
    if (opts.keep_states) tr.states.push_back(s);

    double dt = opts.dt;
    int since_cut = 0, rejections = 0;
    long k_out = 1;
    Field rhs(n), force(n);
    while (s.t < opts.t_end) {
        const double target = std::min(opts.t_end, static_cast<double>(k_out) * opts.output_every);
        double h = std::min(dt, target - s.t);
        if (target - (s.t + h) <= 1e-12 * std::max(1.0, target)) h = target - s.t;

        for (std::size_t i = 0; i < n; ++i) {
            force[i] = c.beta[i] * s.S[i] * s.I[i] / (1.0 + cs.m * s.I[i]);
            rhs[i] = s.I[i] / h + force[i];
        }
        Field I_new = infected.solve(h, rhs);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = s.S[i] / h + c.Lambda[i] - force[i] + c.gamma[i] * I_new[i];
        }
        Field S_new = susceptible.solve(h, rhs);

        if (!finite(S_new) || !finite(I_new)) throw SolverError("state became non-finite");
        if (!all_positive(S_new) || !all_positive(I_new)) {
            ++tr.rejected_steps;
            if (++rejections > opts.positivity_retry_limit) {
                throw SolverError("positivity retries exhausted at t = " + num(s.t));
            }
            dt = 0.5 * h;
            since_cut = 0;
            continue;
        }

        const double before = integrate(mesh, s.S) + integrate(mesh, s.I);
        const double after = integrate(mesh, S_new) + integrate(mesh, I_new);
        const double expected = h * (total_source - integrate(mesh, S_new, c.mu));
        const double defect = std::abs(after - before - expected) / std::max(after, before);
        tr.max_mass_defect = std::max(tr.max_mass_defect, defect);
        if (defect > 1e-10) {
            throw InvariantError("mass law violated at t = " + num(s.t) + " (defect " +
                                 num(defect) + ")");
        }

        s.S = std::move(S_new);
        s.I = std::move(I_new);
        s.t = (h == target - s.t) ? target : s.t + h;
        ++tr.accepted_steps;
        rejections = 0;
        if (dt < opts.dt && ++since_cut >= kRestoreAfter) {
            dt = opts.dt;
            since_cut = 0;
        }
        if (s.t == target) {
            tr.samples.push_back(sample(s, cs, mesh, opts));
            if (opts.keep_states) tr.states.push_back(s);
            ++k_out;
        }
    }
    tr.final = s;
    return tr;
}

double lyapunov_F(const StateField& state, const CoefficientSet& cs, const Mesh& mesh,
                  const ReferenceState& reference) {
    double f = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double x = mesh.centers[i];
        const double ds = state.S[i] - reference.S[i];
        const double di = state.I[i] - reference.I[i];
        f += 0.5 * mesh.widths[i] *
             (std::exp(-cs.q * x / cs.dS) * ds * ds + std::exp(-cs.q * x / cs.dI) * di * di);
    }
    return f;
}

MonitorReport evaluate_monitors(const SimulationTrace& trace, const CoefficientSet& cs,
                                const Mesh& mesh) {
    const Extrema mu = extrema(cs.mu, mesh);
    const Extrema beta = extrema(cs.beta, mesh);
    const Extrema gamma = extrema(cs.gamma, mesh);
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const std::size_t n = mesh.size();

    MonitorReport rep;
    rep.eps0 = 0.5 * cs.m * mu.f_sub / beta.f_star;
    rep.sigma = std::min(rep.eps0 * gamma.f_sub / (1.0 + rep.eps0),
                         mu.f_sub - rep.eps0 * beta.f_star / cs.m);
    rep.ceiling_applicable = cs.dS == cs.dI;
    if (rep.ceiling_applicable && trace.states.size() != trace.samples.size()) {
        throw ConfigError("pointwise ceiling needs the stored states");
    }

    // pointwise ceiling max{(Lambda/(sigma w))^* w, (H0/w)^* w}, w = e^{qx/d}, in logs
    Field ceiling;
    if (rep.ceiling_applicable) {
        const double d = cs.dS;
        double a = -std::numeric_limits<double>::infinity(), b = a;
        for (std::size_t i = 0; i < n; ++i) {
            const double lw = cs.q * mesh.centers[i] / d;
            a = std::max(a, std::log(c.Lambda[i] / rep.sigma) - lw);
            const double h0 = trace.initial.S[i] + (1.0 + rep.eps0) * trace.initial.I[i];
            if (h0 > 0.0) b = std::max(b, std::log(h0) - lw);
        }
        ceiling.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            ceiling[i] = std::exp(std::max(a, b) + cs.q * mesh.centers[i] / d);
        }
    }

    const double source = integrate(mesh, c.Lambda);
    const double mass0 = integrate(mesh, trace.initial.S) + (1.0 + rep.eps0) * integrate(mesh, trace.initial.I);

    const double t_end = trace.samples.empty() ? 0.0 : trace.samples.back().t;
    rep.eta_hat = std::numeric_limits<double>::infinity();
    rep.worst_ceiling_margin = -std::numeric_limits<double>::infinity();
    rep.worst_gronwall_margin = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < trace.samples.size(); ++k) {
        const TraceSample& ts = trace.samples[k];
        MonitorSample ms;
        ms.t = ts.t;
        const double H = ts.mass_S + (1.0 + rep.eps0) * ts.mass_I;
        const double decay = std::exp(-rep.sigma * ts.t);
        ms.gronwall_margin = H - (mass0 * decay + source / rep.sigma * (1.0 - decay));
        rep.worst_gronwall_margin = std::max(rep.worst_gronwall_margin, ms.gronwall_margin);
        if (rep.ceiling_applicable) {
            const StateField& st = trace.states[k];
            double worst = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                worst = std::max(worst, st.S[i] + (1.0 + rep.eps0) * st.I[i] - ceiling[i]);
            }
            ms.ceiling_margin = worst;
            rep.worst_ceiling_margin = std::max(rep.worst_ceiling_margin, worst);
        }
        if (ts.t >= 0.5 * t_end) rep.eta_hat = std::min(rep.eta_hat, ts.min_I);
        rep.samples.push_back(ms);
    }
    return rep;
}

}  // namespace sislab
