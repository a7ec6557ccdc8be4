#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sislab/config.hpp"
#include "sislab/dfe.hpp"
#include "sislab/dynamics.hpp"
#include "sislab/equilibria.hpp"
#include "sislab/error.hpp"
#include "sislab/experiments.hpp"
#include "sislab/report.hpp"
#include "sislab/spectral.hpp"

using namespace sislab;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kInvariant = 4 };

struct Common {
    std::optional<std::string> config;
    std::optional<std::string> out;
    std::vector<std::string> sets;
    std::optional<int> cells;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON configuration file");
    cmd->add_option("--out", c.out, "directory for CSV and summary.json output");
    cmd->add_option("--set", c.sets, "dotted-path override key=value (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    cmd->add_option("--cells", c.cells, "override domain.cells");
}

ConvergenceReport single(const std::string& label) {
    ConvergenceReport r;
    r.label = label;
    r.pass = true;
    return r;
}

void print_scalars(const ConvergenceReport& r) {
    for (const auto& [k, v] : r.scalars) std::printf("%-24s %.10g\n", k.c_str(), v);
    for (const auto& [k, v] : r.checks) std::printf("%-24s %s\n", k.c_str(), v ? "pass" : "FAIL");
}

int finish(const ConvergenceReport& r, const RunConfig& cfg, const Common& c) {
    if (c.out) {
        for (const std::string& path : emit_report(r, cfg, *c.out)) std::printf("wrote %s\n", path.c_str());
    }
    return r.pass ? kOk : kInvariant;
}

int cmd_dfe(const RunConfig& cfg, const Common& c) {
    const Mesh mesh = make_mesh(cfg.mesh);
    const DfeResult d = solve_dfe(cfg.coeffs, mesh);
    ConvergenceReport r = single("dfe");
    r.scalars["mass_S"] = integrate(mesh, d.S_hat);
    r.scalars["mass_residual"] = d.mass_residual;
    r.scalars["max_S"] = max_value(d.S_hat);
    r.scalars["min_S"] = min_value(d.S_hat);
    r.profile = Profile{mesh.centers, d.S_hat, Field(mesh.size(), 0.0)};
    print_scalars(r);
    return finish(r, cfg, c);
}

int cmd_r0(const RunConfig& cfg, const Common& c, bool eigen_only) {
    const Mesh mesh = make_mesh(cfg.mesh);
    const ThresholdReport t = compute_R0(cfg.coeffs, mesh, cfg.solver.eig_tol);
    ConvergenceReport r = single(eigen_only ? "lambda1" : "r0");
    r.scalars["lambda1"] = t.lambda1;
    if (!eigen_only) {
        r.scalars["R0"] = t.R0;
        r.checks["sign_consistent"] = t.consistent;
        r.pass = t.consistent;
        if (cfg.coeffs.q > 0.0) {
            try {
                r.scalars["lambda_bar"] = lambda_bar(cfg.coeffs, mesh, cfg.solver.bc_variant);
                r.scalars["N_S"] = solve_dfe_singular(cfg.coeffs, mesh).N_S;
            } catch (const HypothesisError&) {
            }
        }
    }
    // S column: disease-free profile; I column: principal eigenfunction
    r.profile = Profile{mesh.centers, t.S_hat, eigen_only ? t.lambda1_eig.vector : t.r0_eig.vector};
    print_scalars(r);
    return finish(r, cfg, c);
}

int cmd_ee(const RunConfig& cfg, const Common& c) {
    const Mesh mesh = make_mesh(cfg.mesh);
    const EquilibriumResult ee = solve_ee(cfg.coeffs, mesh, std::nullopt, {cfg.solver.newton_tol, 50});
    ConvergenceReport r = single("ee");
    r.scalars["residual"] = ee.residual;
    r.scalars["newton_iterations"] = ee.newton_iterations;
    r.scalars["mass_S"] = integrate(mesh, ee.S);
    r.scalars["mass_I"] = integrate(mesh, ee.I);
    r.checks["converged"] = ee.converged;
    r.checks["endemic_branch"] = !ee.trivial_branch;
    if (!ee.trivial_branch) {
        const EstimateRatios e = ee_estimates(cfg.coeffs, mesh, ee.S, ee.I);
        r.scalars["estimate_worst_ratio"] = e.worst();
        r.checks["a_priori_estimates"] = e.worst() <= 1.02;
    } else {
        r.notes.push_back("Newton landed on the disease-free branch");
    }
    r.pass = ee.converged;
    r.profile = Profile{mesh.centers, ee.S, ee.I};
    print_scalars(r);
    return finish(r, cfg, c);
}

int cmd_simulate(const RunConfig& cfg, const Common& c) {
    const Mesh mesh = make_mesh(cfg.mesh);
    SimOptions so;
    so.dt = cfg.time.dt;
    so.t_end = cfg.time.t_end;
    so.output_every = cfg.time.output_every;
    ConvergenceReport r = single("simulate");
    try {
        const AnalyticEE a = analytic_ee_under_assumption(cfg.coeffs, mesh);
        so.reference = ReferenceState{a.S, a.I};
        if (!a.note.empty()) r.notes.push_back(a.note);
    } catch (const HypothesisError&) {
        r.notes.push_back("no closed-form endemic state; F is not evaluated");
    }
    const StateField init = initial_state(parse_expr(cfg.initial_S), parse_expr(cfg.initial_I), mesh);
    const SimulationTrace tr = simulate(init, cfg.coeffs, mesh, so);
    const MonitorReport mon = evaluate_monitors(tr, cfg.coeffs, mesh);
    for (std::size_t i = 0; i < tr.samples.size(); ++i) r.trace.push_back(trace_row(tr.samples[i], mon.samples[i]));
    r.scalars["final_mass_S"] = tr.samples.back().mass_S;
    r.scalars["final_mass_I"] = tr.samples.back().mass_I;
    r.scalars["max_mass_defect"] = tr.max_mass_defect;
    r.scalars["accepted_steps"] = tr.accepted_steps;
    r.scalars["rejected_steps"] = tr.rejected_steps;
    r.scalars["eta_hat"] = mon.eta_hat;
    r.scalars["eps0"] = mon.eps0;
    r.scalars["sigma"] = mon.sigma;
    r.scalars["worst_gronwall_margin"] = mon.worst_gronwall_margin;
    r.checks["gronwall_ceiling"] = mon.worst_gronwall_margin <= 1e-12 * std::max(1.0, tr.samples.front().mass_S);
    if (mon.ceiling_applicable) {
        r.scalars["worst_ceiling_margin"] = mon.worst_ceiling_margin;
        r.checks["pointwise_ceiling"] = mon.worst_ceiling_margin <= 1e-12 * std::max(1.0, tr.samples.front().max_sum);
    }
    r.pass = std::all_of(r.checks.begin(), r.checks.end(), [](const auto& kv) { return kv.second; });
    r.profile = Profile{mesh.centers, tr.final.S, tr.final.I};
    print_scalars(r);
    return finish(r, cfg, c);
}

int cmd_limit(const RunConfig& cfg, const Common& c, const std::string& kind) {
    const Mesh mesh = make_mesh(cfg.mesh);
    ConvergenceReport r = single("limit");
    EquilibriumResult res;
    if (kind == "theta_star") {
        res = solve_theta_star(cfg.coeffs, mesh, {cfg.solver.newton_tol, 50});
    } else {
        LimitOptions lo;
        lo.newton = {cfg.solver.newton_tol, 50};
        res = solve_limit_system(parse_limit_kind(kind), cfg.coeffs, mesh, cfg.solver.bc_variant, lo);
    }
    r.parameter = kind;
    r.scalars["residual"] = res.residual;
    r.scalars["max_I"] = max_value(res.I);
    r.scalars["min_I"] = min_value(res.I);
    if (res.boundary_mass) r.scalars["boundary_mass"] = *res.boundary_mass;
    r.checks["converged"] = res.converged;
    r.pass = res.converged;
    r.profile = Profile{mesh.centers, res.S, res.I};
    print_scalars(r);
    return finish(r, cfg, c);
}

int cmd_sweep(const RunConfig& cfg, const Common& c, int threads) {
    const ConvergenceReport r = run_experiment(cfg, {threads});
    std::printf("%-14s %-24s %-8s %s\n", r.parameter.c_str(), "error", "ok", "message");
    for (const LadderPoint& p : r.points) {
        std::printf("%-14.6g %-24.17g %-8s %s\n", p.param, p.error, p.ok ? "yes" : "no", p.message.c_str());
    }
    if (r.order) std::printf("order estimate %.4g\n", *r.order);
    print_scalars(r);
    std::printf("%s: %s\n", to_string(r.kind).c_str(), r.pass ? "PASS" : "FAIL");
    return finish(r, cfg, c);
}

int cmd_verify(RunConfig cfg, const Common& c) {
    cfg.experiment.kind = ExperimentKind::Verify;
    const ConvergenceReport r = run_experiment(cfg);
    for (const CriterionResult& k : r.criteria) {
        std::printf("[%s] %2d %s%s%s\n", k.pass ? "PASS" : "FAIL", k.id, k.name.c_str(),
                    k.detail.empty() ? "" : ": ", k.detail.c_str());
    }
    return finish(r, cfg, c);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial SIS model with saturated incidence: solvers and asymptotic experiments"};
    app.require_subcommand(1);
    Common common;
    std::string limit_kind = "ds_infty";
    int threads = 1;

    auto* dfe = app.add_subcommand("dfe", "disease-free susceptible profile");
    auto* r0 = app.add_subcommand("r0", "basic reproduction number and principal eigenvalue");
    auto* l1 = app.add_subcommand("lambda1", "principal eigenvalue of the linearised infected equation");
    auto* ee = app.add_subcommand("ee", "endemic equilibrium by Newton");
    auto* sim = app.add_subcommand("simulate", "time integration with boundedness monitors");
    auto* lim = app.add_subcommand("limit", "limit system of the endemic state");
    auto* sweep = app.add_subcommand("sweep", "run the configured experiment ladder");
    auto* verify = app.add_subcommand("verify", "acceptance checks");
    for (CLI::App* cmd : {dfe, r0, l1, ee, sim, lim, sweep, verify}) add_common(cmd, common);
    lim->add_option("--kind", limit_kind, "ds_infty | di_infty | ds_zero | theta_star")
        ->check(CLI::IsMember({"ds_infty", "di_infty", "ds_zero", "theta_star"}));
    sweep->add_option("--threads", threads, "ladder points evaluated concurrently")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        const RunConfig cfg = load_config(common.config, common.sets, common.cells);
        if (*dfe) return cmd_dfe(cfg, common);
        if (*r0) return cmd_r0(cfg, common, false);
        if (*l1) return cmd_r0(cfg, common, true);
        if (*ee) return cmd_ee(cfg, common);
        if (*sim) return cmd_simulate(cfg, common);
        if (*lim) return cmd_limit(cfg, common, limit_kind);
        if (*sweep) return cmd_sweep(cfg, common, threads);
        if (*verify) return cmd_verify(cfg, common);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolver;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return kInvariant;
    }
    return kOk;
}
