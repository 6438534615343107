#pragma once

#include <string>
#include <vector>

#include "otfv/problem.hpp"

namespace otfv {

enum class Delta0Mode { Gap, Residual };

// Barrier continuation per Algorithm 1; defaults are the paper's calibration
// (theta = 0.2, alpha_min = 0.1, eps0 = 1e-6, mu0 = 1).
struct SolverParams {
    double mu0 = 1.0;
    double theta = 0.2;
    double eps0 = 1e-6;
    double eps_mu = -1.0; // < 0 means eps_mu = eps0
    double alpha_min = 0.1;
    int n_max = 20;
    // Ceiling for the adaptive decay rate: on inner failure
    // theta <- min(theta_backoff, (1 + theta)/2) and the step is retried from
    // the last converged iterate with the larger mu.
    double theta_backoff = 0.8;
    Delta0Mode delta0_mode = Delta0Mode::Gap;
    double mu_floor = 1e-11;
    int max_outer = 200;
    int max_backoffs = 30;
    // When non-empty, the continuation visits exactly these mu values in
    // order (diagnostic runs such as central-path sweeps).
    std::vector<double> mu_schedule;

    double inner_tol() const { return eps_mu < 0.0 ? eps0 : eps_mu; }
};

struct InnerIterInfo {
    double residual = 0.0;
    double alpha = 0.0;
    double step_norm = 0.0;
};

struct OuterIterInfo {
    double mu = 0.0;
    bool backoff = false; // inner solve failed at this mu, theta was raised
    int newton_iters = 0;
    double final_residual = 0.0;
    double gap_bound = 0.0; // mu N |Omega| / (N+1)
    double action = 0.0;
    double w2 = 0.0;
    double min_rho = 0.0; // over all accepted iterates of the inner solve
    double min_s = 0.0;
    std::vector<InnerIterInfo> inner;
};

struct SolverTrace {
    std::vector<OuterIterInfo> outer;
};

struct NewtonDirection {
    std::vector<CellField> dphi; // N+1 fine slices
    std::vector<CellField> drho; // N coarse slices (interior)
    std::vector<CellField> ds;   // N coarse slices
};

struct Solution {
    SpaceTimeState state;
    std::vector<FluxField> fluxes;
    double w2 = 0.0;
    double final_mu = 0.0;
    bool converged = false;
    std::string failure;
    SolverTrace trace;
};

// Solves the linearization of kkt_residual at `state` (Newton step for the
// perturbed KKT system): ds is eliminated through the complementarity row,
// the (dphi, drho) saddle system is factorized by a sparse direct solver, and
// the phi-constant nullspace is removed by a mean-zero constraint on dphi^1.
// Throws SingularSystem when the factorization fails.
NewtonDirection newton_direction(const SpaceTimeState& state, double mu, const TransportSetup& setup);

// J·v for the full (phi, rho, s) system; independent of mu.
KKTResidual apply_kkt_jacobian(const SpaceTimeState& state, const TransportSetup& setup,
                               const NewtonDirection& dir);

struct StepLength {
    double alpha = 1.0;
    bool too_small = false;
};

// alpha = min(1, 0.95 alpha_max) with alpha_max the largest step keeping the
// interior rho and s strictly positive; flags alpha < alpha_min.
StepLength fraction_to_boundary(const SpaceTimeState& state, const NewtonDirection& dir,
                                const SolverParams& params);

enum class InnerStatus { Converged, StepTooSmall, MaxNewton, Singular };

struct InnerResult {
    InnerStatus status = InnerStatus::Converged;
    int iters = 0;
    double final_residual = 0.0;
    double min_rho = 0.0;
    double min_s = 0.0;
    std::vector<InnerIterInfo> inner;
    bool ok() const { return status == InnerStatus::Converged; }
};

// Newton iteration on the perturbed system at fixed mu, updating `state` in
// place. Accepted iterates keep interior rho and s strictly positive.
InnerResult solve_perturbed(SpaceTimeState& state, double mu, const SolverParams& params,
                            const TransportSetup& setup);

class NewtonKkt;
// Workspace variant reusing a prepared Newton system (pattern + symbolic
// factorization) across mu values.
InnerResult solve_perturbed(SpaceTimeState& state, double mu, const SolverParams& params,
                            const TransportSetup& setup, NewtonKkt& system);

Solution solve(const TransportSetup& setup, const SolverParams& params = {});

// Weighted norm of a direction (max over the three block norms); used for
// trace reporting.
double direction_norm(const NewtonDirection& dir, const TransportSetup& setup);

} // namespace otfv
