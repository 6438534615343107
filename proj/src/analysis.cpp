#include "otfv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "otfv/errors.hpp"

namespace otfv {

const char* to_string(Scheme s) { return s == Scheme::Enriched ? "enriched" : "non-enriched"; }

CellField sample_density_bc(const AnalyticCase& cs, const Mesh& coarse, double t, SamplingMode mode) {
    CellField out(coarse);
    if (mode == SamplingMode::Center) {
        for (std::size_t c = 0; c < coarse.n_cells(); ++c)
            out.v[c] = cs.rho(t, coarse.centers[c].x, coarse.centers[c].y);
    } else {
        // Centroid-fan triangulation with the degree-2 edge-midpoint rule;
        // exact for affine densities (hence identical to center sampling on
        // centroid-centered cells).
        for (std::size_t c = 0; c < coarse.n_cells(); ++c) {
            const auto& loop = coarse.cells[c];
            Vec2 g{0.0, 0.0};
            for (int32_t v : loop) g = g + coarse.vertices[v];
            g = (1.0 / loop.size()) * g;
            double acc = 0.0, area = 0.0;
            for (std::size_t i = 0; i < loop.size(); ++i) {
                const Vec2 p = coarse.vertices[loop[i]];
                const Vec2 q = coarse.vertices[loop[(i + 1) % loop.size()]];
                const double a = 0.5 * cross(q - p, g - p);
                const Vec2 m1 = 0.5 * (p + q);
                const Vec2 m2 = 0.5 * (q + g);
                const Vec2 m3 = 0.5 * (g + p);
                acc += a / 3.0 *
                       (cs.rho(t, m1.x, m1.y) + cs.rho(t, m2.x, m2.y) + cs.rho(t, m3.x, m3.y));
                area += a;
            }
            out.v[c] = acc / area;
        }
    }
    for (double& x : out.v) x = std::max(x, 0.0);
    return out;
}

BoundaryData sample_boundary_pair(const AnalyticCase& cs, const Mesh& coarse, SamplingMode mode) {
    BoundaryData bd;
    bd.rho_in = sample_density_bc(cs, coarse, 0.0, mode);
    bd.rho_f = sample_density_bc(cs, coarse, 1.0, mode);
    CellField one(coarse, 1.0);
    const double m_in = inner_cell(bd.rho_in, one);
    const double m_f = inner_cell(bd.rho_f, one);
    if (m_in <= 0.0 || m_f <= 0.0) throw Error("sampled boundary density has no mass");
    if (std::abs(m_in - m_f) > 1e-12 * std::max(m_in, m_f)) {
        const double mean = 0.5 * (m_in + m_f);
        bd.rescaled = true;
        bd.factor_in = mean / m_in;
        bd.factor_f = mean / m_f;
        for (double& x : bd.rho_in.v) x *= bd.factor_in;
        for (double& x : bd.rho_f.v) x *= bd.factor_f;
    }
    return bd;
}

TransportSetup make_case_setup(const AnalyticCase& cs, const NestedMeshPair& pair, int N,
                               ReconKind kind, SamplingMode mode) {
    BoundaryData bd = sample_boundary_pair(cs, *pair.coarse, mode);
    return make_setup(pair, N, kind, std::move(bd.rho_in), std::move(bd.rho_f));
}

SpaceTimeSamples sample_spacetime(const AnalyticCase& cs, const TransportSetup& setup) {
    const int N = setup.N;
    const double tau = setup.tau();
    const Mesh& fm = setup.fine();
    SpaceTimeSamples out;
    out.phi_ref.reserve(N + 1);
    out.rho_ref.reserve(N + 1);
    for (int k = 1; k <= N + 1; ++k) {
        const double t = (k - 1) * tau + 0.5 * tau;
        CellField rk(fm);
        for (std::size_t c = 0; c < fm.n_cells(); ++c)
            rk.v[c] = cs.rho(t, fm.centers[c].x, fm.centers[c].y);
        out.rho_ref.push_back(std::move(rk));
        CellField pk(fm);
        if (cs.has_phi())
            for (std::size_t c = 0; c < fm.n_cells(); ++c)
                pk.v[c] = cs.phi(t, fm.centers[c].x, fm.centers[c].y);
        out.phi_ref.push_back(std::move(pk));
    }
    return out;
}

ErrorReport errors(const Solution& sol, const AnalyticCase& cs, const TransportSetup& setup,
                   EpsRhoMode rho_mode) {
    if (cs.qualitative) throw Error("errors: case '" + cs.name + "' has no exact solution");
    const int N = setup.N;
    const double tau = setup.tau();
    const SpaceTimeSamples ref = sample_spacetime(cs, setup);

    ErrorReport rep;
    rep.hbar = setup.coarse().h_max;
    rep.N = N;
    rep.kind = to_string(setup.kind);
    rep.scheme = setup.pair->identical ? "non-enriched" : "enriched";

    if (cs.w2_exact) rep.eps_w2 = std::abs(*cs.w2_exact - sol.w2);

    // Density-weighted alignment shift for the potential, then the weighted
    // L2 errors on phi and its discrete gradient.
    std::vector<CellField> wmid; // inject((rho^k + rho^{k-1})/2)
    wmid.reserve(N + 1);
    for (int k = 1; k <= N + 1; ++k)
        wmid.push_back(inject(midpoint_density(sol.state.rho, k), *setup.pair));

    double shift = 0.0;
    if (cs.has_phi()) {
        double num = 0.0, den = 0.0;
        for (int k = 0; k <= N; ++k) {
            CellField diff(setup.fine());
            for (std::size_t c = 0; c < diff.size(); ++c)
                diff.v[c] = sol.state.phi[k].v[c] - ref.phi_ref[k].v[c];
            num += tau * inner_cell(diff, wmid[k]);
            CellField one(setup.fine(), 1.0);
            den += tau * inner_cell(one, wmid[k]);
        }
        shift = den > 0.0 ? num / den : 0.0;

        double acc_phi = 0.0, acc_grad = 0.0;
        for (int k = 0; k <= N; ++k) {
            CellField diff(setup.fine());
            for (std::size_t c = 0; c < diff.size(); ++c)
                diff.v[c] = sol.state.phi[k].v[c] - shift - ref.phi_ref[k].v[c];
            CellField d2(setup.fine());
            for (std::size_t c = 0; c < d2.size(); ++c) d2.v[c] = diff.v[c] * diff.v[c];
            acc_phi += tau * inner_cell(d2, wmid[k]);

            const FluxField gd = gradient(diff);
            const DiamondField w = reconstruct(wmid[k], setup.kind);
            DiamondField g2(setup.fine());
            for (std::size_t f = 0; f < g2.size(); ++f) g2.v[f] = gd.v[f] * gd.v[f];
            acc_grad += tau * inner_diamond(w, g2);
        }
        rep.eps_phi = std::sqrt(std::max(0.0, acc_phi));
        rep.eps_grad_phi = std::sqrt(std::max(0.0, acc_grad));
    }

    // eps_rho: L1-in-time-and-space distance between the mid-slab exact
    // density and the midpoint of adjacent discrete slices.
    double acc_rho = 0.0;
    if (rho_mode == EpsRhoMode::Coarse) {
        const Mesh& cm = setup.coarse();
        for (int k = 1; k <= N + 1; ++k) {
            const double t = (k - 1) * tau + 0.5 * tau;
            for (std::size_t c = 0; c < cm.n_cells(); ++c) {
                const double exact = cs.rho(t, cm.centers[c].x, cm.centers[c].y);
                const double mid = 0.5 * (sol.state.rho[k].v[c] + sol.state.rho[k - 1].v[c]);
                acc_rho += tau * std::abs(exact - mid) * cm.measures[c];
            }
        }
    } else {
        const Mesh& fm = setup.fine();
        for (int k = 1; k <= N + 1; ++k) {
            for (std::size_t c = 0; c < fm.n_cells(); ++c) {
                const int32_t p = setup.pair->parent[c];
                const double mid =
                    0.5 * (sol.state.rho[k].v[p] + sol.state.rho[k - 1].v[p]);
                acc_rho += tau * std::abs(ref.rho_ref[k - 1].v[c] - mid) * fm.measures[c];
            }
        }
    }
    rep.eps_rho = acc_rho;
    return rep;
}

NestedMeshPair build_pair(int n, Scheme scheme) {
    Mesh coarse = generate_acute_triangulation(n);
    if (scheme == Scheme::Enriched) return subdivide_to_nested(coarse);
    return identical_pair(coarse);
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

std::string ConvergenceTable::to_csv() const {
    std::ostringstream os;
    os << "hbar,N,eps_w2,rate_w2,eps_phi,rate_phi,eps_gphi,rate_gphi,eps_rho,rate_rho\n";
    for (const ConvergenceRow& r : rows) {
        os << fmt("%.6g", r.hbar) << "," << r.N << ",";
        os << fmt("%.6e", r.err.eps_w2) << "," << (r.has_rates ? fmt("%.3f", r.rate_w2) : "") << ",";
        os << fmt("%.6e", r.err.eps_phi) << "," << (r.has_rates ? fmt("%.3f", r.rate_phi) : "") << ",";
        os << fmt("%.6e", r.err.eps_grad_phi) << ","
           << (r.has_rates ? fmt("%.3f", r.rate_gphi) : "") << ",";
        os << fmt("%.6e", r.err.eps_rho) << "," << (r.has_rates ? fmt("%.3f", r.rate_rho) : "")
           << "\n";
    }
    return os.str();
}

std::string ConvergenceTable::to_text() const {
    std::ostringstream os;
    os << case_name << ", " << scheme << " scheme, " << kind << " reconstruction\n";
    char line[256];
    std::snprintf(line, sizeof line, "%8s %4s %12s %7s %12s %7s %12s %7s %12s %7s\n", "hbar", "N",
                  "eps_w2", "rate", "eps_phi", "rate", "eps_gphi", "rate", "eps_rho", "rate");
    os << line;
    for (const ConvergenceRow& r : rows) {
        auto rate = [&](double v) { return r.has_rates ? fmt("%.3f", v) : std::string("/"); };
        std::snprintf(line, sizeof line, "%8.4f %4d %12.3e %7s %12.3e %7s %12.3e %7s %12.3e %7s\n",
                      r.hbar, r.N, r.err.eps_w2, rate(r.rate_w2).c_str(), r.err.eps_phi,
                      rate(r.rate_phi).c_str(), r.err.eps_grad_phi, rate(r.rate_gphi).c_str(),
                      r.err.eps_rho, rate(r.rate_rho).c_str());
        os << line;
    }
    return os.str();
}

ConvergenceTable convergence_study(const AnalyticCase& cs, const std::vector<LevelSpec>& levels,
                                   const StudyOptions& opt) {
    ConvergenceTable table;
    table.scheme = to_string(opt.scheme);
    table.kind = to_string(opt.kind);
    table.case_name = cs.name;
    table.rows.resize(levels.size());

    auto run_level = [&](std::size_t i) {
        const LevelSpec& lv = levels[i];
        const NestedMeshPair pair = build_pair(lv.n, opt.scheme);
        const TransportSetup setup = make_case_setup(cs, pair, lv.N, opt.kind, opt.sampling);
        const Solution sol = solve(setup, opt.params);
        if (!sol.converged)
            throw Error("convergence_study: solver failed at level n=" + std::to_string(lv.n) +
                        ", N=" + std::to_string(lv.N) + " (" + sol.failure + ")");
        ConvergenceRow row;
        row.hbar = pair.coarse->h_max;
        row.N = lv.N;
        row.err = errors(sol, cs, setup, opt.eps_rho_mode);
        table.rows[i] = std::move(row);
    };

    const int workers = std::max(1, opt.workers);
    if (workers == 1 || levels.size() <= 1) {
        for (std::size_t i = 0; i < levels.size(); ++i) run_level(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errs(levels.size());
        const int nthreads = std::min<std::size_t>(workers, levels.size());
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < levels.size(); i = next.fetch_add(1)) {
                    try {
                        run_level(i);
                    } catch (...) {
                        errs[i] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        ConvergenceRow& cur = table.rows[i];
        const ConvergenceRow& prev = table.rows[i - 1];
        cur.has_rates = true;
        auto rate = [](double e_prev, double e_cur) { return std::log2(e_prev / e_cur); };
        cur.rate_w2 = rate(prev.err.eps_w2, cur.err.eps_w2);
        cur.rate_phi = rate(prev.err.eps_phi, cur.err.eps_phi);
        cur.rate_gphi = rate(prev.err.eps_grad_phi, cur.err.eps_grad_phi);
        cur.rate_rho = rate(prev.err.eps_rho, cur.err.eps_rho);
    }
    return table;
}

namespace {

double total_variation(const CellField& a) {
    const Mesh& m = *a.mesh;
    double tv = 0.0;
    for (std::size_t f = 0; f < m.n_faces(); ++f)
        tv += std::abs(a.v[m.face_l[f]] - a.v[m.face_k[f]]) * m.face_m[f];
    return tv;
}

} // namespace

double oscillation_index(const Solution& sol, const TransportSetup& setup, const AnalyticCase* exact) {
    const int N = setup.N;
    const Mesh& cm = setup.coarse();

    CellField mid(cm);
    int k_mid;
    if (N >= 1) {
        k_mid = (N % 2 == 1) ? (N + 1) / 2 : N / 2; // interior slice nearest t = 1/2
        mid = sol.state.rho[k_mid];
    } else {
        k_mid = 0;
        for (std::size_t c = 0; c < cm.n_cells(); ++c)
            mid.v[c] = 0.5 * (sol.state.rho[0].v[c] + sol.state.rho[1].v[c]);
    }
    const double tv = total_variation(mid);

    double tv_ref;
    if (exact != nullptr && !exact->qualitative) {
        const double t = N >= 1 ? k_mid * setup.tau() : 0.5;
        CellField ref(cm);
        for (std::size_t c = 0; c < cm.n_cells(); ++c)
            ref.v[c] = exact->rho(t, cm.centers[c].x, cm.centers[c].y);
        tv_ref = total_variation(ref);
    } else {
        tv_ref = std::max(total_variation(setup.rho_in), total_variation(setup.rho_f));
    }
    if (tv_ref <= 0.0) return std::max(0.0, tv);
    return std::max(0.0, (tv - tv_ref) / tv_ref);
}

} // namespace otfv
