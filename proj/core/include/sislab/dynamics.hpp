#pragma once

#include <optional>
#include <vector>

#include "sislab/coefficients.hpp"
#include "sislab/field.hpp"
#include "sislab/mesh.hpp"

namespace sislab {

struct StateField {
    Field S;
    Field I;
    double t = 0.0;
};

struct ReferenceState {
    Field S;
    Field I;
};

struct SimOptions {
    double dt = 0.01;
    double t_end = 1.0;
    double output_every = 0.1;
    int positivity_retry_limit = 40;
    bool keep_states = true;  // store full fields at every sample
    std::optional<ReferenceState> reference;
};

struct TraceSample {
    double t = 0.0;
    double mass_S = 0.0;
    double mass_I = 0.0;
    double min_S = 0.0;
    double min_I = 0.0;
    double max_sum = 0.0;        // max of S + I
    double F = 0.0;              // Lyapunov functional, NaN without a reference
    double ref_distance = 0.0;   // max(|S - S_ref|, |I - I_ref|), NaN without a reference
};

struct SimulationTrace {
    std::vector<TraceSample> samples;  // first sample is the initial state
    std::vector<StateField> states;    // full fields, one per sample (when kept)
    StateField initial;
    StateField final;
    int accepted_steps = 0;
    int rejected_steps = 0;
    double max_mass_defect = 0.0;  // worst per-step mass-law defect, relative
};

/// First-order IMEX time stepping of the SIS system with zero-flux ends.
///
/// Each step solves the I equation (transport, diffusion and recovery implicit)
/// and then the S equation (transport, diffusion and death implicit). Incidence
/// uses the state at the start of the step; the recovery gain in the S equation
/// uses the new I, so total mass changes by exactly dt (int Lambda - int mu S_new).
/// A step producing a non-positive node is retried with dt halved; the nominal
/// dt is restored after 10 accepted steps.
///
/// Throws SolverError when retries run out or the state stops being finite, and
/// InvariantError when a step breaks the mass law by more than 1e-10.
SimulationTrace simulate(const StateField& init, const CoefficientSet& cs, const Mesh& mesh,
                         const SimOptions& opts);

/// 1/2 int e^{-qx/dS} (S - S_ref)^2 + 1/2 int e^{-qx/dI} (I - I_ref)^2.
double lyapunov_F(const StateField& state, const CoefficientSet& cs, const Mesh& mesh,
                  const ReferenceState& reference);

struct MonitorSample {
    double t = 0.0;
    std::optional<double> ceiling_margin;  // max_x (H - pointwise ceiling); <= 0 holds
    double gronwall_margin = 0.0;          // int H - integral ceiling; <= 0 holds
};

struct MonitorReport {
    std::vector<MonitorSample> samples;
    bool ceiling_applicable = false;  // pointwise ceiling needs dS == dI
    double eps0 = 0.0;
    double sigma = 0.0;
    double eta_hat = 0.0;  // min of min_x I over samples with t >= t_end / 2
    double worst_ceiling_margin = 0.0;
    double worst_gronwall_margin = 0.0;
};

/// Boundedness and persistence diagnostics for H = S + (1 + eps0) I with
/// eps0 = m mu_min / (2 beta_max) and sigma = min(eps0 gamma_min / (1 + eps0), mu_min - eps0 beta_max / m).
/// The pointwise ceiling needs the stored states; throws ConfigError without them.
MonitorReport evaluate_monitors(const SimulationTrace& trace, const CoefficientSet& cs,
                                const Mesh& mesh);

/// Initial state from expressions (sampled at centres; must be positive).
StateField initial_state(const CoeffExpr& S0, const CoeffExpr& I0, const Mesh& mesh);

}  // namespace sislab
