#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sislab/config.hpp"
#include "sislab/dynamics.hpp"
#include "sislab/field.hpp"

namespace sislab {

struct LadderPoint {
    double param = 0.0;
    double error = 0.0;  // NaN when the point failed
    std::map<std::string, double> metrics;
    double runtime_s = 0.0;
    bool ok = false;
    std::string message;  // solver error text for a failed point
};

struct Profile {
    Field x;
    Field S;
    Field I;
};

struct TraceRow {
    double t = 0.0;
    double mass_S = 0.0;
    double mass_I = 0.0;
    double min_I = 0.0;
    double F = 0.0;                // NaN without a reference state
    double ceiling_margin = 0.0;   // NaN when not applicable
    double gronwall_margin = 0.0;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::map<std::string, double> metrics;
    std::string detail;
};

/// Result of an experiment or verification run. Everything except the
/// runtime fields is a deterministic function of the configuration.
struct ConvergenceReport {
    ExperimentKind kind = ExperimentKind::Verify;
    std::string label;      // summary "kind"; empty means to_string(kind)
    std::string parameter;  // ladder parameter name
    std::vector<LadderPoint> points;
    std::optional<double> order;  // least-squares slope of log error against log parameter
    double tolerance = 0.0;
    std::map<std::string, double> scalars;
    std::map<std::string, bool> checks;
    std::vector<CriterionResult> criteria;  // verify only
    std::optional<Profile> profile;
    std::vector<TraceRow> trace;
    std::vector<std::string> notes;
    bool pass = false;
    double runtime_s = 0.0;
};

struct ExperimentOptions {
    int threads = 1;  // ladder points evaluated concurrently when > 1
};

/// Default ladder and tolerance of each kind.
std::vector<double> default_ladder(ExperimentKind kind);
double default_tolerance(ExperimentKind kind);

/// Runs the configured ladder against the kind's limit object:
///  q_infty   rescaled layer (a, b) vs K e^{-y/d} on [0, 3 max(dS, dI)]; S, I on [0, 0.9L]
///  ds_zero   boundary mass on [0.95L, L] vs N_S, I vs the transport-limit pair,
///            dS S(L - dS y) vs (q |Lambda|_1 / mu(L)) e^{-qy} on [0, 3/q]
///  di_zero   |S - S_hat| on [0, L] and int I
///  ds_infty  S vs int Lambda / int mu and I vs I^inf on [0, L]
///  di_infty  oscillation of I and the integral constraint
///  m_infty   |mI - theta*| on [0, L]
///  r0_limits R0 vs S_hat(L) beta(L) / gamma(L) along dI, monotone growth in q, R0 vs R0* at dS = 1e3
///  stability distance to the reference state at t_end and Lyapunov descent, per m
/// A solver failure marks its point failed; the report is still returned.
/// Throws HypothesisError when the base data violate the kind's hypotheses.
/// kind = verify runs the acceptance checks (see run_verify).
ConvergenceReport run_experiment(const RunConfig& cfg, const ExperimentOptions& opts = {});

/// Least-squares slope of log(error) against log(param) over points with
/// finite positive errors; empty with fewer than two such points.
std::optional<double> fit_order(const std::vector<LadderPoint>& points);

TraceRow trace_row(const TraceSample& s, const MonitorSample& m);

}  // namespace sislab
