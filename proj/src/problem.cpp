#include "otfv/problem.hpp"

#include <cmath>
#include <limits>

namespace otfv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TransportSetup make_setup(const NestedMeshPair& pair, int N, ReconKind kind, CellField rho_in,
                          CellField rho_f) {
    if (N < 0) throw Error("make_setup: N >= 0 required");
    require_same_mesh(rho_in.mesh, pair.coarse.get(), "make_setup: rho_in not on coarse mesh");
    require_same_mesh(rho_f.mesh, pair.coarse.get(), "make_setup: rho_f not on coarse mesh");
    for (double x : rho_in.v)
        if (x < 0.0) throw NegativeDensity("make_setup: rho_in < 0");
    for (double x : rho_f.v)
        if (x < 0.0) throw NegativeDensity("make_setup: rho_f < 0");
    CellField one(*pair.coarse, 1.0);
    const double m_in = inner_cell(rho_in, one);
    const double m_f = inner_cell(rho_f, one);
    if (std::abs(m_in - m_f) > 1e-12 * std::max(m_in, m_f))
        throw Error("make_setup: boundary densities must carry the same total mass");
    TransportSetup setup;
    setup.pair = &pair;
    setup.N = N;
    setup.kind = kind;
    setup.rho_in = std::move(rho_in);
    setup.rho_f = std::move(rho_f);
    return setup;
}

SpaceTimeState initial_state(const TransportSetup& setup, double mu0) {
    SpaceTimeState st;
    const int N = setup.N;
    CellField one(setup.coarse(), 1.0);
    const double mass = inner_cell(setup.rho_in, one);
    const double c = mass / setup.omega();
    st.phi.assign(N + 1, CellField(setup.fine(), 0.0));
    st.rho.reserve(N + 2);
    st.rho.push_back(setup.rho_in);
    for (int k = 1; k <= N; ++k) st.rho.push_back(CellField(setup.coarse(), c));
    st.rho.push_back(setup.rho_f);
    st.s.assign(N, CellField(setup.coarse(), mu0 / c));
    return st;
}

double kinetic_density(double p, double q) {
    if (p > 0.0) return 0.5 * q * q / p;
    if (p == 0.0 && q == 0.0) return 0.0;
    return kInf;
}

CellField midpoint_density(const std::vector<CellField>& rho, int k) {
    CellField mid(*rho[k].mesh);
    for (std::size_t c = 0; c < mid.size(); ++c) mid.v[c] = 0.5 * (rho[k].v[c] + rho[k - 1].v[c]);
    return mid;
}

double action(const std::vector<CellField>& rho, const std::vector<FluxField>& flux,
              const TransportSetup& setup) {
    const int N = setup.N;
    const double tau = setup.tau();
    for (const CellField& slice : rho)
        for (double x : slice.v)
            if (x < 0.0) return kInf;
    const Mesh& fm = setup.fine();
    double total = 0.0;
    for (int k = 1; k <= N + 1; ++k) {
        const DiamondField r = reconstruct(inject(midpoint_density(rho, k), *setup.pair), setup.kind);
        const FluxField& fk = flux[k - 1];
        double slice = 0.0;
        for (std::size_t f = 0; f < fm.n_faces(); ++f) {
            const double b = kinetic_density(r.v[f], fk.v[f]);
            if (b == kInf) return kInf;
            slice += b * fm.face_md[f];
        }
        total += tau * slice;
    }
    return total;
}

std::vector<FluxField> flux_from_potential(const std::vector<CellField>& rho,
                                           const std::vector<CellField>& phi,
                                           const TransportSetup& setup) {
    const int N = setup.N;
    std::vector<FluxField> flux;
    flux.reserve(N + 1);
    for (int k = 1; k <= N + 1; ++k) {
        const DiamondField r = reconstruct(inject(midpoint_density(rho, k), *setup.pair), setup.kind);
        const FluxField g = gradient(phi[k - 1]);
        FluxField fk(setup.fine());
        for (std::size_t f = 0; f < fk.size(); ++f) fk.v[f] = r.v[f] * g.v[f];
        flux.push_back(std::move(fk));
    }
    return flux;
}

std::vector<CellField> continuity_residual(const std::vector<CellField>& rho,
                                           const std::vector<FluxField>& flux,
                                           const TransportSetup& setup) {
    const int N = setup.N;
    const double inv_tau = 1.0 / setup.tau();
    std::vector<CellField> res;
    res.reserve(N + 1);
    for (int k = 1; k <= N + 1; ++k) {
        CellField dt(setup.coarse());
        for (std::size_t c = 0; c < dt.size(); ++c)
            dt.v[c] = (rho[k].v[c] - rho[k - 1].v[c]) * inv_tau;
        CellField r = inject(dt, *setup.pair);
        const CellField dv = divergence(flux[k - 1]);
        for (std::size_t c = 0; c < r.size(); ++c) r.v[c] += dv.v[c];
        res.push_back(std::move(r));
    }
    return res;
}

double spacetime_block_norm(const std::vector<CellField>& slices, double tau) {
    double acc = 0.0;
    for (const CellField& f : slices) acc += inner_cell(f, f);
    return std::sqrt(tau * acc);
}

KKTResidual kkt_residual(const SpaceTimeState& state, double mu, const TransportSetup& setup) {
    const int N = setup.N;
    const double tau = setup.tau();
    KKTResidual res;

    const std::vector<FluxField> flux = flux_from_potential(state.rho, state.phi, setup);
    res.r_cont = continuity_residual(state.rho, flux, setup);

    // Squared-gradient diamond fields per phi slice, reused across HJ rows.
    std::vector<DiamondField> g2;
    g2.reserve(N + 1);
    for (int k = 1; k <= N + 1; ++k) {
        const FluxField g = gradient(state.phi[k - 1]);
        DiamondField q(setup.fine());
        for (std::size_t f = 0; f < q.size(); ++f) q.v[f] = g.v[f] * g.v[f];
        g2.push_back(std::move(q));
    }

    res.r_hj.reserve(N);
    res.r_comp.reserve(N);
    for (int k = 1; k <= N; ++k) {
        CellField dphi(setup.fine());
        for (std::size_t c = 0; c < dphi.size(); ++c)
            dphi.v[c] = (state.phi[k].v[c] - state.phi[k - 1].v[c]) / tau;
        CellField hj = inject_adjoint(dphi, *setup.pair);

        const CellField qa = reconstruct_coarse_adjoint(midpoint_density(state.rho, k), g2[k - 1],
                                                        setup.kind, *setup.pair);
        const CellField qb = reconstruct_coarse_adjoint(midpoint_density(state.rho, k + 1), g2[k],
                                                        setup.kind, *setup.pair);
        for (std::size_t c = 0; c < hj.size(); ++c)
            hj.v[c] += 0.25 * qa.v[c] + 0.25 * qb.v[c] + state.s[k - 1].v[c];
        res.r_hj.push_back(std::move(hj));

        CellField comp(setup.coarse());
        for (std::size_t c = 0; c < comp.size(); ++c)
            comp.v[c] = state.rho[k].v[c] * state.s[k - 1].v[c] - mu;
        res.r_comp.push_back(std::move(comp));
    }

    res.norm = spacetime_block_norm(res.r_cont, tau);
    res.norm = std::max(res.norm, spacetime_block_norm(res.r_hj, tau));
    res.norm = std::max(res.norm, spacetime_block_norm(res.r_comp, tau));
    return res;
}

double discrete_w2(const std::vector<CellField>& rho, const std::vector<CellField>& phi,
                   const TransportSetup& setup) {
    const int N = setup.N;
    const double tau = setup.tau();
    double acc = 0.0;
    for (int k = 1; k <= N + 1; ++k) {
        const DiamondField r = reconstruct(inject(midpoint_density(rho, k), *setup.pair), setup.kind);
        const FluxField g = gradient(phi[k - 1]);
        DiamondField q(setup.fine());
        for (std::size_t f = 0; f < q.size(); ++f) q.v[f] = g.v[f] * g.v[f];
        acc += inner_diamond(r, q);
    }
    // W^2/2 = (tau/2) * acc.
    return std::sqrt(std::max(0.0, tau * acc));
}

double dual_objective(const std::vector<CellField>& phi, const TransportSetup& setup) {
    if (setup.kind != ReconKind::Linear)
        throw UnsupportedKind("dual_objective applies to the linear reconstruction only");
    const int N = setup.N;
    const double tau = setup.tau();

    auto boundary_term = [&](const CellField& p, double sign_q) {
        const FluxField g = gradient(p);
        DiamondField q(setup.fine());
        for (std::size_t f = 0; f < q.size(); ++f) q.v[f] = g.v[f] * g.v[f];
        CellField dummy(setup.coarse(), 1.0); // linear kind: operator is density-independent
        const CellField rq = reconstruct_coarse_adjoint(dummy, q, ReconKind::Linear, *setup.pair);
        CellField t = inject_adjoint(p, *setup.pair);
        for (std::size_t c = 0; c < t.size(); ++c) t.v[c] += sign_q * 0.25 * tau * rq.v[c];
        return t;
    };

    const CellField tf = boundary_term(phi[N], -1.0);
    const CellField ti = boundary_term(phi[0], +1.0);
    return inner_cell(tf, setup.rho_f) - inner_cell(ti, setup.rho_in);
}

double barrier_value(const std::vector<CellField>& rho, const TransportSetup& setup) {
    const int N = setup.N;
    const double tau = setup.tau();
    const Mesh& cm = setup.coarse();
    double total = 0.0;
    for (int k = 1; k <= N; ++k) {
        for (std::size_t c = 0; c < cm.n_cells(); ++c) {
            const double x = rho[k].v[c];
            if (x <= 0.0) return kInf;
            total -= tau * std::log(x) * cm.measures[c];
        }
    }
    return total;
}

} // namespace otfv
