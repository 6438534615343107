#include "otfv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "otfv/kernels.hpp"
#include "otfv/newton_kkt.hpp"

namespace otfv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double min_interior(const std::vector<CellField>& slices) {
    double m = kInf;
    for (const CellField& f : slices)
        for (double x : f.v) m = std::min(m, x);
    return m;
}

double min_interior_rho(const SpaceTimeState& state, const TransportSetup& setup) {
    double m = kInf;
    for (int k = 1; k <= setup.N; ++k)
        for (double x : state.rho[k].v) m = std::min(m, x);
    return m;
}

// Subtract the fine-mesh weighted mean of phi^1 from every slice; the KKT
// residual is invariant under a global constant in phi.
void normalize_phi(SpaceTimeState& state, const TransportSetup& setup) {
    const Mesh& fm = setup.fine();
    const double c =
        kernels::dot(state.phi[0].v.data(), fm.measures.data(), fm.n_cells()) / fm.total_area;
    if (c == 0.0) return;
    for (CellField& slice : state.phi)
        for (double& x : slice.v) x -= c;
}

} // namespace

double direction_norm(const NewtonDirection& dir, const TransportSetup& setup) {
    const double tau = setup.tau();
    double n = spacetime_block_norm(dir.dphi, tau);
    n = std::max(n, spacetime_block_norm(dir.drho, tau));
    n = std::max(n, spacetime_block_norm(dir.ds, tau));
    return n;
}

StepLength fraction_to_boundary(const SpaceTimeState& state, const NewtonDirection& dir,
                                const SolverParams& params) {
    double ratio = kInf;
    for (std::size_t k = 0; k < dir.drho.size(); ++k)
        ratio = std::min(ratio, kernels::max_step_ratio(state.rho[k + 1].v.data(),
                                                        dir.drho[k].v.data(), dir.drho[k].size()));
    for (std::size_t k = 0; k < dir.ds.size(); ++k)
        ratio = std::min(ratio, kernels::max_step_ratio(state.s[k].v.data(), dir.ds[k].v.data(),
                                                        dir.ds[k].size()));
    StepLength st;
    st.alpha = std::min(1.0, 0.95 * ratio);
    st.too_small = st.alpha < params.alpha_min;
    return st;
}

InnerResult solve_perturbed(SpaceTimeState& state, double mu, const SolverParams& params,
                            const TransportSetup& setup) {
    NewtonKkt system(setup);
    return solve_perturbed(state, mu, params, setup, system);
}

InnerResult solve_perturbed(SpaceTimeState& state, double mu, const SolverParams& params,
                            const TransportSetup& setup, NewtonKkt& system) {
    const double tol = params.inner_tol();
    InnerResult result;
    result.min_rho = setup.N > 0 ? min_interior_rho(state, setup) : kInf;
    result.min_s = setup.N > 0 ? min_interior(state.s) : kInf;

    for (int it = 0; it <= params.n_max; ++it) {
        const KKTResidual res = kkt_residual(state, mu, setup);
        result.final_residual = res.norm;
        if (res.norm <= tol) {
            result.status = InnerStatus::Converged;
            result.iters = it;
            return result;
        }
        if (it == params.n_max) break;

        NewtonDirection dir;
        try {
            dir = system.direction(state, res);
        } catch (const SingularSystem&) {
            result.status = InnerStatus::Singular;
            result.iters = it;
            return result;
        }
        const StepLength st = fraction_to_boundary(state, dir, params);
        if (st.too_small) {
            result.status = InnerStatus::StepTooSmall;
            result.iters = it;
            return result;
        }
        for (int k = 0; k <= setup.N; ++k)
            kernels::axpy(st.alpha, dir.dphi[k].v.data(), state.phi[k].v.data(), state.phi[k].size());
        for (int k = 1; k <= setup.N; ++k) {
            kernels::axpy(st.alpha, dir.drho[k - 1].v.data(), state.rho[k].v.data(),
                          state.rho[k].size());
            kernels::axpy(st.alpha, dir.ds[k - 1].v.data(), state.s[k - 1].v.data(),
                          state.s[k - 1].size());
        }
        normalize_phi(state, setup);
        result.inner.push_back({res.norm, st.alpha, st.alpha * direction_norm(dir, setup)});
        if (setup.N > 0) {
            result.min_rho = std::min(result.min_rho, min_interior_rho(state, setup));
            result.min_s = std::min(result.min_s, min_interior(state.s));
        }
    }
    result.status = InnerStatus::MaxNewton;
    result.iters = params.n_max;
    return result;
}

Solution solve(const TransportSetup& setup, const SolverParams& params_in) {
    SolverParams params = params_in;
    const int N = setup.N;
    const double gap_factor = static_cast<double>(N) / (N + 1) * setup.omega();

    Solution sol;
    NewtonKkt system(setup);
    SpaceTimeState good = initial_state(setup, params.mu0);
    double mu_good = params.mu0;
    double theta = params.theta;
    int backoffs = 0;
    int at_cap_failures = 0;

    // `at` must be the state the inner solve produced (when it succeeded).
    auto record = [&](double mu, const InnerResult& ir, bool accepted, const SpaceTimeState& at) {
        OuterIterInfo oi;
        oi.mu = mu;
        oi.backoff = !accepted;
        oi.newton_iters = ir.iters;
        oi.final_residual = ir.final_residual;
        oi.gap_bound = mu * gap_factor;
        oi.min_rho = ir.min_rho;
        oi.min_s = ir.min_s;
        oi.inner = ir.inner;
        if (accepted) {
            const std::vector<FluxField> flux = flux_from_potential(at.rho, at.phi, setup);
            oi.action = action(at.rho, flux, setup);
            oi.w2 = discrete_w2(at.rho, at.phi, setup);
        }
        sol.trace.outer.push_back(std::move(oi));
    };

    auto finish = [&](bool converged, std::string why) {
        sol.state = std::move(good);
        sol.fluxes = flux_from_potential(sol.state.rho, sol.state.phi, setup);
        sol.w2 = discrete_w2(sol.state.rho, sol.state.phi, setup);
        sol.final_mu = mu_good;
        sol.converged = converged;
        sol.failure = std::move(why);
        return std::move(sol);
    };

    if (!params.mu_schedule.empty()) {
        for (double mu : params.mu_schedule) {
            SpaceTimeState trial = good;
            const InnerResult ir = solve_perturbed(trial, mu, params, setup, system);
            record(mu, ir, ir.ok(), trial);
            if (!ir.ok()) return finish(false, "inner solve failed at scheduled mu");
            good = std::move(trial);
            mu_good = mu;
        }
        return finish(true, "");
    }

    double delta0 = kInf;
    int outer = 0;
    while (delta0 > params.eps0) {
        if (++outer > params.max_outer) return finish(false, "MaxOuterIterations");
        const double mu_try = std::max(theta * mu_good, params.mu_floor);
        SpaceTimeState trial = good;
        const InnerResult ir = solve_perturbed(trial, mu_try, params, setup, system);
        record(mu_try, ir, ir.ok(), trial);
        if (ir.ok()) {
            good = std::move(trial);
            mu_good = mu_try;
            if (params.delta0_mode == Delta0Mode::Gap) {
                delta0 = mu_good * gap_factor;
            } else {
                delta0 = kkt_residual(good, 0.0, setup).norm;
            }
            if (delta0 > params.eps0 && mu_good <= params.mu_floor)
                return finish(false, "mu floor reached before delta0 <= eps0");
        } else {
            if (++backoffs > params.max_backoffs) return finish(false, "backoff limit reached");
            const double theta_new = std::min(params.theta_backoff, 0.5 * (1.0 + theta));
            if (theta_new <= theta + 1e-12 && ++at_cap_failures > 2)
                return finish(false, "inner solver failed repeatedly at backoff ceiling");
            theta = theta_new;
        }
    }
    return finish(true, "");
}

} // namespace otfv
