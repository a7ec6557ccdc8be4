#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sislab/coefficients.hpp"
#include "sislab/dynamics.hpp"
#include "sislab/field.hpp"
#include "sislab/mesh.hpp"
#include "sislab/spectral.hpp"

namespace sislab {

struct EquilibriumResult {
    Field S;
    Field I;
    double residual = 0.0;  // max over rows of |equation| / row magnitude
    int newton_iterations = 0;
    bool converged = false;
    bool trivial_branch = false;  // I collapsed to zero (no endemic state found)
    std::optional<double> boundary_mass;
    std::vector<double> residual_history;
};

/// Newton stops once the scaled residual is below tol and the last step,
/// relative to the iterate, is below sqrt(tol).
struct NewtonOptions {
    double tol = 1e-10;
    int max_iterations = 50;
};

/// Scaled residual of the discrete steady equations at (S, I).
double ee_residual(const CoefficientSet& cs, const Mesh& mesh, std::span<const double> S,
                   std::span<const double> I);

/// Endemic equilibrium by damped Newton on the interleaved unknowns
/// (S_0, I_0, S_1, I_1, ...), banded Jacobian of bandwidth 2, Armijo
/// backtracking after a positivity cut. Without `init` the start is the state
/// of a time march to t = 50 from S = Lambda/mu, I = 0.1 Lambda/mu.
/// Throws SolverError when Newton does not converge within max_iterations.
EquilibriumResult solve_ee(const CoefficientSet& cs, const Mesh& mesh,
                           const std::optional<StateField>& init = std::nullopt,
                           const NewtonOptions& opts = {});

/// A-priori bounds for a positive steady state, as ratios (<= 1 when a bound holds).
///  mass_S_low:  (int Lambda / mu_max) / int S
///  mass_S_high: int S / (int Lambda / mu_min)
///  mass_I_high: int I / (beta_max int Lambda / (m mu_min gamma_min))
///  ceiling_S, ceiling_I: max over cells of S, I divided by the pointwise
///  boundary-layer ceilings; present only for q > 0.
struct EstimateRatios {
    double mass_S_low = 0.0;
    double mass_S_high = 0.0;
    double mass_I_high = 0.0;
    std::optional<double> ceiling_S;
    std::optional<double> ceiling_I;
    double worst() const;
};

EstimateRatios ee_estimates(const CoefficientSet& cs, const Mesh& mesh, std::span<const double> S,
                            std::span<const double> I);

struct AnalyticEE {
    Field S;
    Field I;
    double kappa = 0.0;  // S = kappa e^{qx/dS}
    double r = 0.0;      // (Lambda beta - gamma mu) / (gamma mu e^{qx/dI})
    std::string note;    // set when the 1/m factor changes the printed formula
};

/// Closed-form endemic state when Lambda/(mu e^{qx/dS}) and
/// (Lambda beta - gamma mu)/(gamma mu e^{qx/dI}) are constant:
/// S = Lambda/mu, I = (Lambda beta - gamma mu)/(m gamma mu).
/// Throws HypothesisError naming the quantity whose relative variation on the
/// grid exceeds 1e-10, or when Lambda beta - gamma mu <= 0 somewhere.
AnalyticEE analytic_ee_under_assumption(const CoefficientSet& cs, const Mesh& mesh);

/// Positive solution of dI t'' - q t' + (beta S_hat/(1 + t) - gamma) t = 0 with
/// zero-flux ends, stored in `I` (`S` holds S_hat). Throws HypothesisError when R0 <= 1.
EquilibriumResult solve_theta_star(const CoefficientSet& cs, const Mesh& mesh,
                                   const NewtonOptions& opts = {});

enum class LimitKind { DsInfty, DiInfty, DsZero };

std::string to_string(LimitKind k);
LimitKind parse_limit_kind(std::string_view s);  // "ds_infty" | "di_infty" | "ds_zero"

struct LimitOptions {
    NewtonOptions newton;
    std::optional<Field> init_I;  // starting infected profile (DsInfty, DsZero)
    // DsZero only: take the boundary mass from the current regular part,
    // (int Lambda - int mu S) / mu(L), instead of the disease-free N_S
    bool balanced_layer_mass = false;
};

/// Limit systems of the endemic state.
///  DsInfty: S = int Lambda / int mu, I from the scalar steady equation
///           (order-preserving iteration, then Newton; a sub- or supersolution
///           start converges to the minimal or maximal solution).
///  DiInfty: constant I chosen so that int beta S/(1 + m I) = int gamma, S from
///           the linear S equation at that I.
///  DsZero:  pure transport S with S(0) = 0 alternated with I carrying the
///           boundary datum M beta(L) I/(1 + m I) at x = L (times mu(L) for the
///           Paper variant), M = N_S unless balanced; boundary_mass = M.
/// Throws HypothesisError when the kind's hypothesis fails on the grid, and
/// SolverError on stagnation.
EquilibriumResult solve_limit_system(LimitKind kind, const CoefficientSet& cs, const Mesh& mesh,
                                     BcVariant variant = BcVariant::Derived,
                                     const LimitOptions& opts = {});

}  // namespace sislab
