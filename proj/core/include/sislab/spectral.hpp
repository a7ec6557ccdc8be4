#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sislab/coefficients.hpp"
#include "sislab/dfe.hpp"
#include "sislab/eigen.hpp"
#include "sislab/field.hpp"
#include "sislab/mesh.hpp"

namespace sislab {

/// Which downstream boundary coefficient the auxiliary eigenproblem uses:
/// Paper multiplies n beta(L) by mu(L), Derived does not.
enum class BcVariant { Paper, Derived };

std::string to_string(BcVariant v);
BcVariant parse_bc_variant(std::string_view s);  // "paper" | "derived"

/// Boundary condition d u' - q u = coefficient * u at one end.
struct RobinDatum {
    enum class Side { Upstream, Downstream };
    Side side = Side::Downstream;
    double coefficient = 0.0;
};

/// Principal eigenvalue of -d u'' + q u' + c u with zero-flux ends (or the
/// given Robin end). The eigenvalue is evaluated from the converged vector in a
/// face-split form that has no cancellation, so small eigenvalues of stiff
/// operators keep their absolute accuracy. `vector` holds the eigenfunction in
/// physical coordinates, scaled to unit maximum.
EigenResult lambda1(const Mesh& mesh, double d, double q, std::span<const double> potential,
                    std::optional<RobinDatum> robin = std::nullopt, double tol = 1e-12);

struct ThresholdReport {
    double R0 = 0.0;
    double lambda1 = 0.0;
    bool consistent = false;  // sign(1 - R0) == sign(lambda1), or |R0 - 1| <= 10 tol
    EigenResult r0_eig;       // vector: physical coordinates, unit maximum
    EigenResult lambda1_eig;
    Field S_hat;
};

ThresholdReport compute_R0(const CoefficientSet& cs, const Mesh& mesh, double tol = 1e-12);

/// Same as compute_R0 with a caller-supplied susceptible profile.
ThresholdReport compute_R0_with(const CoefficientSet& cs, const Mesh& mesh,
                                std::span<const double> S_hat, double tol = 1e-12);

/// R0 with the susceptible profile replaced by int Lambda / int mu.
double compute_R0_star(const CoefficientSet& cs, const Mesh& mesh, double tol = 1e-12);

/// Value of the R0 quotient int(S beta w eta^2) / (dI int(w eta_x^2) + int(gamma w eta^2)),
/// w = exp(q x / dI), for the trial function eta in weighted coordinates.
double r0_trial_quotient(const CoefficientSet& cs, const Mesh& mesh,
                         std::span<const double> S_hat, std::span<const double> eta);

/// Principal eigenvalue of the auxiliary problem with potential gamma - S_inf beta
/// and downstream Robin coefficient n beta(L) [mu(L)].
EigenResult tau1(double n, const CoefficientSet& cs, const Mesh& mesh, BcVariant variant,
                 double tol = 1e-12);
EigenResult tau1(double n, const CoefficientSet& cs, const Mesh& mesh, BcVariant variant,
                 const SingularDfeResult& sdfe, double tol = 1e-12);

/// Downstream Robin coefficient used by tau1 for mass n.
double tau1_robin_coefficient(double n, const CoefficientSet& cs, BcVariant variant);

/// Root of n -> tau1(n). Empty when gamma/beta <= S_inf somewhere on the grid,
/// where tau1(n) < 0 for all n > 0. Throws SolverError if no bracket is found.
std::optional<double> find_N0(const CoefficientSet& cs, const Mesh& mesh, BcVariant variant);

/// tau1 evaluated at the transport-limit mass N_S.
double lambda_bar(const CoefficientSet& cs, const Mesh& mesh, BcVariant variant);

}  // namespace sislab
