#include "sislab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "sislab/dfe.hpp"
#include "sislab/dynamics.hpp"
#include "sislab/equilibria.hpp"
#include "sislab/error.hpp"
#include "sislab/report.hpp"
#include "sislab/spectral.hpp"
#include "sislab/suite.hpp"

namespace sislab {

namespace {

using Body = std::function<void(CriterionResult&)>;

CriterionResult criterion(int id, const char* name, const Body& body) {
    CriterionResult c;
    c.id = id;
    c.name = name;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = std::string("exception: ") + e.what();
    }
    return c;
}

RunConfig experiment_config(const CoefficientSet& cs, MeshSpec mesh, ExperimentKind kind,
                            std::vector<double> ladder) {
    RunConfig cfg;
    cfg.coeffs = cs;
    cfg.mesh = mesh;
    cfg.experiment.kind = kind;
    cfg.experiment.ladder = std::move(ladder);
    return cfg;
}

MeshSpec graded(int cells, double ratio) { return {1.0, cells, Grading::geometric(ratio)}; }

double final_metric(const ConvergenceReport& r, const std::string& key) {
    if (r.points.empty()) return std::nan("");
    const auto it = r.points.back().metrics.find(key);
    return it == r.points.back().metrics.end() ? std::nan("") : it->second;
}

std::string failed_checks(const ConvergenceReport& r) {
    std::string s;
    for (const auto& [k, v] : r.checks) {
        if (!v) s += (s.empty() ? "" : ", ") + k;
    }
    for (const LadderPoint& p : r.points) {
        if (!p.ok) s += (s.empty() ? "" : "; ") + ("point " + num(p.param) + ": " + p.message);
    }
    return s.empty() ? "all checks hold" : "failed: " + s;
}

double row_scale(const TridiagonalOperator& A, const Field& u, std::size_t i) {
    double s = std::abs(A.diag[i] * u[i]);
    if (i > 0) s += std::abs(A.lower[i] * u[i - 1]);
    if (i + 1 < A.size()) s += std::abs(A.upper[i] * u[i + 1]);
    return s;
}

void discrete_structure(CriterionResult& c) {
    double kernel = 0.0, mass = 0.0;
    for (const CoefficientSet& cs : random_configs(1, 20)) {
        const Mesh mesh = build_mesh(cs.L, 200, Grading::geometric(0.99));
        for (double d : {cs.dS, cs.dI}) {
            const TridiagonalOperator A = assemble_operator(mesh, d, cs.q);
            Field u(mesh.size());
            for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(cs.q * (mesh.centers[i] - mesh.L) / d);
            const Field r = A.apply(u);
            for (std::size_t i = 0; i < u.size(); ++i) kernel = std::max(kernel, std::abs(r[i]) / row_scale(A, u, i));
        }
        const DfeResult dfe = solve_dfe(cs, mesh);
        mass = std::max(mass, dfe.mass_residual / integrate(mesh, sample_coefficients(cs, mesh).Lambda));
    }
    c.metrics["kernel_residual"] = kernel;
    c.metrics["mass_residual"] = mass;
    c.pass = kernel <= 1e-12 && mass <= 1e-10;
}

void constant_oracles(CriterionResult& c) {
    const Mesh mesh = build_mesh(1.0, 200);
    const CoefficientSet cs = cs_a();
    const ThresholdReport t = compute_R0(cs, mesh);
    const EquilibriumResult ee = solve_ee(cs, mesh);
    const EquilibriumResult th = solve_theta_star(cs, mesh);
    double e_ee = 0.0, e_th = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        e_ee = std::max({e_ee, std::abs(ee.S[i] - 1.0), std::abs(ee.I[i] - 2.0)});
        e_th = std::max(e_th, std::abs(th.I[i] - 2.0));
    }
    c.metrics["R0_error"] = std::abs(t.R0 - 3.0);
    c.metrics["lambda1_error"] = std::abs(t.lambda1 + 2.0);
    c.metrics["ee_error"] = e_ee;
    c.metrics["theta_error"] = e_th;
    c.pass = true;
    for (const auto& kv : c.metrics) c.pass = c.pass && kv.second <= 1e-9;
}

void threshold_equivalence(CriterionResult& c) {
    int tested = 0, exceptions = 0;
    for (const CoefficientSet& cs : random_configs(101, 60)) {
        try {
            const ThresholdReport r = compute_R0(cs, build_mesh(cs.L, 200));
            if (std::abs(r.R0 - 1.0) <= 1e-3) continue;
            ++tested;
            if (!r.consistent || (r.R0 > 1.0) != (r.lambda1 < 0.0)) ++exceptions;
        } catch (const SolverError&) {
            ++tested;
            ++exceptions;
        }
    }
    c.metrics["tested"] = tested;
    c.metrics["exceptions"] = exceptions;
    c.pass = tested >= 50 && exceptions == 0;
}

void r0_limits(CriterionResult& c) {
    const ConvergenceReport r = run_experiment(
        experiment_config(cs_c(1.0), graded(1000, 0.995), ExperimentKind::R0Limits, {1e-1, 1e-2, 1e-3}));
    c.metrics["downstream_error"] = r.points.empty() ? std::nan("") : r.points.back().error;
    c.metrics["R0_q40"] = r.scalars.at("R0_q40");
    c.metrics["averaged_limit_error"] = r.scalars.at("averaged_limit_error");
    c.pass = r.pass;
    c.detail = failed_checks(r);
}

void small_ds_eigenvalue(CriterionResult& c) {
    const CoefficientSet cs = cs_c(1e-3);
    const Mesh mesh = build_mesh(1.0, 1000, Grading::geometric(0.995));
    const double l1 = compute_R0(cs, mesh).lambda1;
    c.metrics["lambda1"] = l1;
    int matches = 0;
    std::string matched;
    for (BcVariant v : {BcVariant::Paper, BcVariant::Derived}) {
        const double tau = lambda_bar(cs, mesh, v);
        const double gap = std::abs(l1 - tau) / std::abs(l1);
        c.metrics["tau1_" + to_string(v)] = tau;
        c.metrics["gap_" + to_string(v)] = gap;
        if (gap <= 0.02) {
            ++matches;
            matched = to_string(v);
        }
    }
    c.pass = matches == 1;
    c.detail = matches == 1 ? "matching variant: " + matched
                            : "variants within 2%: " + std::to_string(matches);
}

void attractivity(CriterionResult& c) {
    const CoefficientSet cs = cs_b(10.0);
    const Mesh mesh = build_mesh(1.0, 100);
    const AnalyticEE a = analytic_ee_under_assumption(cs, mesh);
    SimOptions so;
    so.dt = 0.01;
    so.t_end = 200.0;
    so.output_every = 0.01;
    so.keep_states = false;
    so.reference = ReferenceState{a.S, a.I};
    double dist = 0.0, rise = -INFINITY;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SimulationTrace tr = simulate(random_initial_state(seed, mesh), cs, mesh, so);
        dist = std::max(dist, tr.samples.back().ref_distance);
        for (std::size_t j = 1; j < tr.samples.size(); ++j) rise = std::max(rise, tr.samples[j].F - tr.samples[j - 1].F);
    }
    c.metrics["max_distance"] = dist;
    c.metrics["max_F_increase"] = rise;
    c.pass = dist <= 1e-4 && rise <= 1e-10;
}

void monitors(CriterionResult& c) {
    RandomConfigOptions eq;
    eq.equal_diffusion = true;
    std::vector<CoefficientSet> suite = random_configs(7, 6, eq);
    for (const CoefficientSet& cs : random_configs(8, 6)) suite.push_back(cs);
    SimOptions so;
    so.dt = 0.01;
    so.t_end = 20.0;
    so.output_every = 0.5;
    int violations = 0, pointwise_runs = 0, samples = 0;
    double worst_c = -INFINITY, worst_g = -INFINITY;
    std::uint64_t seed = 1;
    for (const CoefficientSet& cs : suite) {
        const Mesh mesh = build_mesh(cs.L, 100);
        const SimulationTrace tr = simulate(random_initial_state(seed++, mesh), cs, mesh, so);
        const MonitorReport m = evaluate_monitors(tr, cs, mesh);
        const double slack = 1e-12 * std::max(1.0, tr.samples.front().mass_S + (1.0 + m.eps0) * tr.samples.front().mass_I);
        if (m.ceiling_applicable) ++pointwise_runs;
        for (const MonitorSample& s : m.samples) {
            ++samples;
            worst_g = std::max(worst_g, s.gronwall_margin);
            if (s.gronwall_margin > slack) ++violations;
            if (s.ceiling_margin) {
                worst_c = std::max(worst_c, *s.ceiling_margin);
                if (*s.ceiling_margin > slack) ++violations;
            }
        }
    }
    c.metrics["violations"] = violations;
    c.metrics["pointwise_runs"] = pointwise_runs;
    c.metrics["samples"] = samples;
    c.metrics["worst_ceiling_margin"] = worst_c;
    c.metrics["worst_gronwall_margin"] = worst_g;
    c.pass = violations == 0 && pointwise_runs > 0;
}

void estimates(CriterionResult& c) {
    RandomConfigOptions o;
    o.beta_lo = 2.0;
    std::vector<CoefficientSet> suite = random_configs(23, 12, o);
    suite.push_back(cs_a());
    suite.push_back(cs_c(1.0));
    int tested = 0, unsolved = 0;
    double worst = 0.0;
    for (const CoefficientSet& cs : suite) {
        const Mesh mesh = build_mesh(cs.L, 300, Grading::geometric(0.995));
        if (compute_R0(cs, mesh).R0 < 1.1) continue;
        try {
            const EquilibriumResult r = solve_ee(cs, mesh);
            worst = std::max(worst, ee_estimates(cs, mesh, r.S, r.I).worst());
            ++tested;
        } catch (const SolverError&) {
            ++unsolved;
        }
    }
    c.metrics["tested"] = tested;
    c.metrics["unsolved"] = unsolved;
    c.metrics["worst_ratio"] = worst;
    c.pass = tested >= 6 && worst <= 1.02;
}

void large_q(CriterionResult& c) {
    const ConvergenceReport r = run_experiment(
        experiment_config(cs_a(), graded(800, 0.99), ExperimentKind::QInfty, {25.0, 50.0, 100.0, 200.0}));
    c.metrics["error_a"] = final_metric(r, "error_a");
    c.metrics["error_b"] = final_metric(r, "error_b");
    c.metrics["interior_max"] = final_metric(r, "interior_max");
    c.pass = r.pass;
    c.detail = failed_checks(r);
}

void small_ds(CriterionResult& c) {
    const ConvergenceReport r = run_experiment(
        experiment_config(cs_c(1e-2), graded(3000, 0.995), ExperimentKind::DsZero, {1e-2, 1e-3, 1e-4}));
    for (const char* k : {"boundary_mass", "boundary_mass_error", "infected_error", "rescaled_layer_error",
                          "balanced_infected_error", "balanced_rescaled_layer_error"}) {
        c.metrics[k] = final_metric(r, k);
    }
    c.metrics["N_S"] = r.scalars.at("N_S");
    c.metrics["balanced_mass"] = r.scalars.at("balanced_mass");
    c.pass = r.pass;
    c.detail = failed_checks(r);
}

void limit_theorems(CriterionResult& c) {
    struct Part {
        const char* name;
        CoefficientSet cs;
        MeshSpec mesh;
        ExperimentKind kind;
        std::vector<double> ladder;
    };
    const std::vector<Part> parts = {
        {"ds_infty", cs_c(1.0), graded(400, 0.995), ExperimentKind::DsInfty, {10.0, 100.0, 1000.0}},
        {"di_infty", cs_c(1.0), graded(400, 0.995), ExperimentKind::DiInfty, {10.0, 100.0, 1000.0}},
        {"di_zero", cs_a_het(1e-1), graded(1000, 0.995), ExperimentKind::DiZero, {1e-1, 1e-2, 1e-3, 1e-4}},
        {"m_infty", cs_c(1.0), graded(400, 0.995), ExperimentKind::MInfty, {10.0, 100.0, 1000.0, 1e4}},
    };
    c.pass = true;
    for (const Part& p : parts) {
        const ConvergenceReport r = run_experiment(experiment_config(p.cs, p.mesh, p.kind, p.ladder));
        const std::string n = p.name;
        c.metrics[n + ".error"] = r.points.empty() ? std::nan("") : r.points.back().error;
        for (const auto& [k, v] : r.points.empty() ? std::map<std::string, double>{} : r.points.back().metrics) {
            c.metrics[n + "." + k] = v;
        }
        c.pass = c.pass && r.pass;
        c.detail += (c.detail.empty() ? "" : " | ") + n + ": " + failed_checks(r);
    }
}

void persistence(CriterionResult& c) {
    SimOptions so;
    so.dt = 0.05;
    so.t_end = 400.0;
    so.output_every = 5.0;
    so.keep_states = false;
    SimOptions twice = so;
    twice.t_end = 2.0 * so.t_end;
    int below = 0, above = 0, failures = 0;
    double worst_mass = 0.0, min_eta = INFINITY, worst_drift = 0.0;
    // the floor of the endemic I scales like exp(-qL/dI); keep it representable
    RandomConfigOptions o;
    o.peclet_max = 5.0;
    std::uint64_t seed = 100;
    for (const CoefficientSet& cs : random_configs(31, 24, o)) {
        const Mesh mesh = build_mesh(cs.L, 80);
        const double r0 = compute_R0(cs, mesh).R0;
        const StateField init = random_initial_state(seed++, mesh);
        if (r0 < 0.9) {
            ++below;
            const double m = simulate(init, cs, mesh, so).samples.back().mass_I;
            worst_mass = std::max(worst_mass, m);
            if (!(m < 1e-6)) ++failures;
        } else if (r0 > 1.1) {
            ++above;
            const double e1 = evaluate_monitors(simulate(init, cs, mesh, so), cs, mesh).eta_hat;
            const double e2 = evaluate_monitors(simulate(init, cs, mesh, twice), cs, mesh).eta_hat;
            const double drift = std::abs(e2 - e1) / e1;
            min_eta = std::min(min_eta, e1);
            worst_drift = std::max(worst_drift, drift);
            if (!(e1 > 1e-6) || !(drift <= 0.2)) ++failures;
        }
    }
    c.metrics["extinct_runs"] = below;
    c.metrics["persistent_runs"] = above;
    c.metrics["worst_final_mass_I"] = worst_mass;
    c.metrics["min_eta_hat"] = min_eta;
    c.metrics["worst_eta_drift"] = worst_drift;
    c.metrics["failures"] = failures;
    c.pass = failures == 0 && below > 0 && above > 0;
}

void cross_solver(CriterionResult& c) {
    RandomConfigOptions o;
    o.beta_lo = 2.0;
    SimOptions so;
    so.dt = 0.05;
    so.t_end = 300.0;
    so.output_every = 10.0;
    int compared = 0, skipped = 0;
    double worst = 0.0;
    std::uint64_t seed = 200;
    for (const CoefficientSet& cs : random_configs(23, 12, o)) {
        const Mesh mesh = build_mesh(cs.L, 100);
        if (compute_R0(cs, mesh).R0 < 1.1) continue;
        const StateField init = random_initial_state(seed++, mesh);
        try {
            const EquilibriumResult ee = solve_ee(cs, mesh);
            const SimulationTrace tr = simulate(init, cs, mesh, so);
            const StateField& before = tr.states[tr.states.size() - 2];
            // settled: change over the last output interval below 1e-10
            const double change = std::max(sup_distance(tr.final.S, before.S), sup_distance(tr.final.I, before.I));
            if (change > 1e-10) {
                ++skipped;
                continue;
            }
            worst = std::max({worst, sup_distance(tr.final.S, ee.S), sup_distance(tr.final.I, ee.I)});
            ++compared;
        } catch (const SolverError&) {
            ++skipped;
        }
    }
    c.metrics["compared"] = compared;
    c.metrics["skipped"] = skipped;
    c.metrics["worst_distance"] = worst;
    c.pass = compared >= 3 && worst <= 1e-6;
}

}  // namespace

ConvergenceReport run_verify() {
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceReport r;
    r.kind = ExperimentKind::Verify;
    r.criteria.push_back(criterion(1, "discrete structure", discrete_structure));
    r.criteria.push_back(criterion(2, "constant-coefficient oracles", constant_oracles));
    r.criteria.push_back(criterion(3, "threshold equivalence", threshold_equivalence));
    r.criteria.push_back(criterion(4, "R0 limits", r0_limits));
    r.criteria.push_back(criterion(5, "small-dS principal eigenvalue", small_ds_eigenvalue));
    r.criteria.push_back(criterion(6, "global attractivity", attractivity));
    r.criteria.push_back(criterion(7, "boundedness monitors", monitors));
    r.criteria.push_back(criterion(8, "a-priori estimates", estimates));
    r.criteria.push_back(criterion(9, "large-advection boundary layer", large_q));
    r.criteria.push_back(criterion(10, "small-dS concentration", small_ds));
    r.criteria.push_back(criterion(11, "diffusion and saturation limits", limit_theorems));
    r.criteria.push_back(criterion(12, "persistence dichotomy", persistence));
    r.criteria.push_back(criterion(13, "cross-solver oracle", cross_solver));
    for (const CriterionResult& c : r.criteria) r.checks["criterion_" + std::to_string(c.id)] = c.pass;
    r.pass = std::all_of(r.criteria.begin(), r.criteria.end(), [](const CriterionResult& c) { return c.pass; });
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

ConvergenceReport run_verify_twice(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceReport first = run_verify();
    const ConvergenceReport second = run_verify();
    const bool same = summary_body(first, cfg) == summary_body(second, cfg);
    CriterionResult c;
    c.id = 14;
    c.name = "determinism";
    c.pass = same;
    c.detail = same ? "summary bodies identical" : "summary bodies differ";
    first.criteria.push_back(c);
    first.checks["criterion_14"] = same;
    first.pass = first.pass && same;
    first.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return first;
}

}  // namespace sislab
