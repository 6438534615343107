#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>

#include "otfv/newton_kkt.hpp"

namespace otfv {

namespace {

// Face coefficients of the second differential of the harmonic adjoint:
// d/de (dH[a + e da])*u picks up gXY * da_Y on the cell-X side.
struct SecondDiffCoeffs {
    double gaa, gab, gba, gbb;
};

SecondDiffCoeffs second_diff_face(const Mesh& m, std::size_t f, const std::vector<double>& a) {
    const double ak = a[m.face_k[f]];
    const double al = a[m.face_l[f]];
    const double den = m.face_dk[f] * al + m.face_dl[f] * ak;
    const double h = m.face_d[f] * ak * al / den;
    const double hk = m.face_wk[f] * (h / ak) * (h / ak);
    const double hl = m.face_wl[f] * (h / al) * (h / al);
    SecondDiffCoeffs c;
    c.gaa = 2.0 * h / (ak * ak) * hk - 2.0 * h * h / (ak * ak * ak);
    c.gab = 2.0 * h / (ak * ak) * hl;
    c.gba = 2.0 * h / (al * al) * hk;
    c.gbb = 2.0 * h / (al * al) * hl - 2.0 * h * h / (al * al * al);
    return c;
}

} // namespace

std::vector<NewtonKkt::SliceData> NewtonKkt::build_slices(const SpaceTimeState& state) const {
    std::vector<SliceData> s;
    s.reserve(setup_->N + 1);
    for (int k = 1; k <= setup_->N + 1; ++k) {
        SliceData d;
        d.mid = midpoint_density(state.rho, k);
        d.a = inject(d.mid, *setup_->pair);
        d.recon = reconstruct(d.a, setup_->kind);
        d.grad = gradient(state.phi[k - 1]);
        recon_diff_coeffs(d.a, setup_->kind, d.ck, d.cl);
        s.push_back(std::move(d));
    }
    return s;
}

NewtonKkt::NewtonKkt(const TransportSetup& setup) : setup_(&setup) {
    const int N = setup.N;
    const Mesh& fm = setup.fine();
    nf_ = static_cast<Eigen::Index>(fm.n_cells());
    nc_ = static_cast<Eigen::Index>(setup.coarse().n_cells());
    n_phi_ = (N + 1) * nf_;
    n_rho_ = static_cast<Eigen::Index>(N) * nc_;
    dim_ = n_phi_ + n_rho_ + 1;
}

// The assembly is emitted twice through the same code path: once to fix the
// sparsity pattern (values ignored), then per Newton step to refill values in
// the identical slot order. No entry may be skipped on a state-dependent
// condition, or the pattern would drift.
template <class Emit>
void NewtonKkt::emit_entries(const SpaceTimeState& state, const std::vector<SliceData>& sl,
                             Emit&& emit) const {
    const TransportSetup& setup = *setup_;
    const int N = setup.N;
    const Mesh& fm = setup.fine();
    const Mesh& cm = setup.coarse();
    const double tau = setup.tau();
    const bool harmonic = setup.kind == ReconKind::Harmonic;
    const Eigen::Index border = n_phi_ + n_rho_;

    auto phi_idx = [&](int k, int32_t K) { return static_cast<Eigen::Index>(k - 1) * nf_ + K; };
    auto rho_idx = [&](int k, int32_t P) {
        return n_phi_ + static_cast<Eigen::Index>(k - 1) * nc_ + P;
    };

    // Continuity rows, k = 1..N+1 on fine cells.
    for (int k = 1; k <= N + 1; ++k) {
        const SliceData& d = sl[k - 1];
        for (std::size_t f = 0; f < fm.n_faces(); ++f) {
            const int32_t A = fm.face_k[f];
            const int32_t B = fm.face_l[f];
            const double t = d.recon.v[f] * fm.face_m[f] * fm.face_inv_d[f];
            emit(phi_idx(k, A), phi_idx(k, A), -t / fm.measures[A]);
            emit(phi_idx(k, A), phi_idx(k, B), t / fm.measures[A]);
            emit(phi_idx(k, B), phi_idx(k, A), t / fm.measures[B]);
            emit(phi_idx(k, B), phi_idx(k, B), -t / fm.measures[B]);

            const double g = d.grad.v[f];
            const int32_t PA = setup.pair->parent[A];
            const int32_t PB = setup.pair->parent[B];
            const double fA = 0.5 * d.ck[f] * g * fm.face_m[f];
            const double fB = 0.5 * d.cl[f] * g * fm.face_m[f];
            for (int j : {k, k - 1}) {
                if (j < 1 || j > N) continue;
                emit(phi_idx(k, A), rho_idx(j, PA), fA / fm.measures[A]);
                emit(phi_idx(k, A), rho_idx(j, PB), fB / fm.measures[A]);
                emit(phi_idx(k, B), rho_idx(j, PA), -fA / fm.measures[B]);
                emit(phi_idx(k, B), rho_idx(j, PB), -fB / fm.measures[B]);
            }
        }
        for (int32_t K = 0; K < nf_; ++K) {
            const int32_t P = setup.pair->parent[K];
            if (k <= N) emit(phi_idx(k, K), rho_idx(k, P), 1.0 / tau);
            if (k - 1 >= 1) emit(phi_idx(k, K), rho_idx(k - 1, P), -1.0 / tau);
        }
    }

    // Hamilton-Jacobi rows, k = 1..N on coarse cells, with ds eliminated via
    // the complementarity row: ds = (-r_comp - s drho)/rho.
    for (int k = 1; k <= N; ++k) {
        for (int32_t K = 0; K < nf_; ++K) {
            const int32_t P = setup.pair->parent[K];
            const double w = fm.measures[K] / cm.measures[P] / tau;
            emit(rho_idx(k, P), phi_idx(k + 1, K), w);
            emit(rho_idx(k, P), phi_idx(k, K), -w);
        }
        for (int j : {k, k + 1}) {
            const SliceData& d = sl[j - 1];
            for (std::size_t f = 0; f < fm.n_faces(); ++f) {
                const double g = d.grad.v[f];
                const int32_t A = fm.face_k[f];
                const int32_t B = fm.face_l[f];
                const int32_t PA = setup.pair->parent[A];
                const int32_t PB = setup.pair->parent[B];
                const double wA = 0.5 * d.ck[f] * g * fm.face_m[f] / cm.measures[PA];
                const double wB = 0.5 * d.cl[f] * g * fm.face_m[f] / cm.measures[PB];
                emit(rho_idx(k, PA), phi_idx(j, B), wA);
                emit(rho_idx(k, PA), phi_idx(j, A), -wA);
                emit(rho_idx(k, PB), phi_idx(j, B), wB);
                emit(rho_idx(k, PB), phi_idx(j, A), -wB);
                if (harmonic) {
                    const SecondDiffCoeffs c = second_diff_face(fm, f, d.a.v);
                    const double u = g * g;
                    const double WA = 0.25 * u * fm.face_m[f] * fm.face_dk[f] / cm.measures[PA];
                    const double WB = 0.25 * u * fm.face_m[f] * fm.face_dl[f] / cm.measures[PB];
                    for (int jj : {j, j - 1}) {
                        if (jj < 1 || jj > N) continue;
                        emit(rho_idx(k, PA), rho_idx(jj, PA), 0.5 * WA * c.gaa);
                        emit(rho_idx(k, PA), rho_idx(jj, PB), 0.5 * WA * c.gab);
                        emit(rho_idx(k, PB), rho_idx(jj, PA), 0.5 * WB * c.gba);
                        emit(rho_idx(k, PB), rho_idx(jj, PB), 0.5 * WB * c.gbb);
                    }
                }
            }
        }
        for (int32_t P = 0; P < nc_; ++P)
            emit(rho_idx(k, P), rho_idx(k, P), -state.s[k - 1].v[P] / state.rho[k].v[P]);
    }

    // Nullspace bordering: mean-zero constraint on dphi^1; the border column
    // only needs a nonzero overlap with the mass-telescoping left nullspace
    // (m_K weights on continuity rows), so slice 1 suffices and keeps the
    // column sparse.
    for (int32_t K = 0; K < nf_; ++K) {
        emit(border, phi_idx(1, K), fm.measures[K]);
        emit(phi_idx(1, K), border, fm.measures[K]);
    }
}

NewtonDirection NewtonKkt::direction(const SpaceTimeState& state, const KKTResidual& res) {
    const TransportSetup& setup = *setup_;
    const int N = setup.N;
    const std::vector<SliceData> sl = build_slices(state);

    if (!pattern_ready_) {
        std::vector<Eigen::Triplet<double>> trip;
        emit_entries(state, sl, [&](Eigen::Index r, Eigen::Index c, double) {
            trip.emplace_back(r, c, 0.0);
        });
        matrix_.resize(dim_, dim_);
        matrix_.setFromTriplets(trip.begin(), trip.end());
        matrix_.makeCompressed();
        // Map every emission slot to its compressed-storage position.
        slots_.clear();
        slots_.reserve(trip.size());
        const auto* outer = matrix_.outerIndexPtr();
        const auto* inner = matrix_.innerIndexPtr();
        for (const auto& t : trip) {
            const auto col = t.col();
            const auto* begin = inner + outer[col];
            const auto* end = inner + outer[col + 1];
            const auto* it = std::lower_bound(begin, end, t.row());
            slots_.push_back(static_cast<Eigen::Index>(it - inner));
        }
        lu_.analyzePattern(matrix_);
        pattern_ready_ = true;
    }

    double* vals = matrix_.valuePtr();
    std::fill(vals, vals + matrix_.nonZeros(), 0.0);
    std::size_t slot = 0;
    emit_entries(state, sl,
                 [&](Eigen::Index, Eigen::Index, double v) { vals[slots_[slot++]] += v; });

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim_);
    for (int k = 1; k <= N + 1; ++k)
        for (int32_t K = 0; K < nf_; ++K)
            rhs[(k - 1) * nf_ + K] = -res.r_cont[k - 1].v[K];
    for (int k = 1; k <= N; ++k)
        for (int32_t P = 0; P < nc_; ++P)
            rhs[n_phi_ + (k - 1) * nc_ + P] =
                -res.r_hj[k - 1].v[P] + res.r_comp[k - 1].v[P] / state.rho[k].v[P];

    lu_.factorize(matrix_);
    if (lu_.info() != Eigen::Success)
        throw SingularSystem("Newton system factorization failed: " + lu_.lastErrorMessage());
    const Eigen::VectorXd x = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success) throw SingularSystem("Newton system solve failed");

    NewtonDirection dir;
    dir.dphi.assign(N + 1, CellField(setup.fine()));
    for (int k = 1; k <= N + 1; ++k)
        for (int32_t K = 0; K < nf_; ++K) dir.dphi[k - 1].v[K] = x[(k - 1) * nf_ + K];
    dir.drho.assign(N, CellField(setup.coarse()));
    dir.ds.assign(N, CellField(setup.coarse()));
    for (int k = 1; k <= N; ++k)
        for (int32_t P = 0; P < nc_; ++P) {
            const double dr = x[n_phi_ + (k - 1) * nc_ + P];
            dir.drho[k - 1].v[P] = dr;
            dir.ds[k - 1].v[P] =
                (-res.r_comp[k - 1].v[P] - state.s[k - 1].v[P] * dr) / state.rho[k].v[P];
        }
    return dir;
}

NewtonDirection newton_direction(const SpaceTimeState& state, double mu,
                                 const TransportSetup& setup) {
    NewtonKkt sys(setup);
    return sys.direction(state, kkt_residual(state, mu, setup));
}

KKTResidual apply_kkt_jacobian(const SpaceTimeState& state, const TransportSetup& setup,
                               const NewtonDirection& dir) {
    const int N = setup.N;
    const double tau = setup.tau();
    const Mesh& fm = setup.fine();
    NewtonKkt sys(setup);
    const std::vector<NewtonKkt::SliceData> sl = sys.build_slices(state);

    // Coarse midpoint perturbations (drho^0 = drho^{N+1} = 0).
    auto dmid = [&](int k) {
        CellField out(setup.coarse());
        if (k >= 1 && k <= N)
            for (std::size_t c = 0; c < out.size(); ++c) out.v[c] += 0.5 * dir.drho[k - 1].v[c];
        if (k - 1 >= 1 && k - 1 <= N)
            for (std::size_t c = 0; c < out.size(); ++c) out.v[c] += 0.5 * dir.drho[k - 2].v[c];
        return out;
    };

    KKTResidual out;
    out.r_cont.reserve(N + 1);
    std::vector<FluxField> dgrad;
    dgrad.reserve(N + 1);
    std::vector<CellField> da_fine;
    da_fine.reserve(N + 1);
    for (int k = 1; k <= N + 1; ++k) {
        dgrad.push_back(gradient(dir.dphi[k - 1]));
        da_fine.push_back(inject(dmid(k), *setup.pair));
    }

    for (int k = 1; k <= N + 1; ++k) {
        const auto& d = sl[k - 1];
        const DiamondField drda = reconstruct_diff(d.a, da_fine[k - 1], setup.kind);
        FluxField dflux(fm);
        for (std::size_t f = 0; f < fm.n_faces(); ++f)
            dflux.v[f] = d.recon.v[f] * dgrad[k - 1].v[f] + drda.v[f] * d.grad.v[f];
        CellField r = divergence(dflux);
        CellField dt(setup.coarse());
        if (k <= N)
            for (std::size_t c = 0; c < dt.size(); ++c) dt.v[c] += dir.drho[k - 1].v[c] / tau;
        if (k - 1 >= 1)
            for (std::size_t c = 0; c < dt.size(); ++c) dt.v[c] -= dir.drho[k - 2].v[c] / tau;
        const CellField dtf = inject(dt, *setup.pair);
        for (std::size_t c = 0; c < r.size(); ++c) r.v[c] += dtf.v[c];
        out.r_cont.push_back(std::move(r));
    }

    out.r_hj.reserve(N);
    out.r_comp.reserve(N);
    for (int k = 1; k <= N; ++k) {
        CellField dphi_t(fm);
        for (std::size_t c = 0; c < dphi_t.size(); ++c)
            dphi_t.v[c] = (dir.dphi[k].v[c] - dir.dphi[k - 1].v[c]) / tau;
        CellField hj = inject_adjoint(dphi_t, *setup.pair);
        for (int j : {k, k + 1}) {
            const auto& d = sl[j - 1];
            DiamondField gg(fm);
            for (std::size_t f = 0; f < fm.n_faces(); ++f)
                gg.v[f] = d.grad.v[f] * dgrad[j - 1].v[f];
            const CellField qa =
                inject_adjoint(reconstruct_diff_adjoint(d.a, gg, setup.kind), *setup.pair);
            for (std::size_t c = 0; c < hj.size(); ++c) hj.v[c] += 0.5 * qa.v[c];
            if (setup.kind == ReconKind::Harmonic) {
                DiamondField g2(fm);
                for (std::size_t f = 0; f < fm.n_faces(); ++f) g2.v[f] = d.grad.v[f] * d.grad.v[f];
                const CellField d2 = inject_adjoint(
                    reconstruct_second_diff_action(d.a, g2, da_fine[j - 1], setup.kind),
                    *setup.pair);
                for (std::size_t c = 0; c < hj.size(); ++c) hj.v[c] += 0.25 * d2.v[c];
            }
        }
        for (std::size_t c = 0; c < hj.size(); ++c) hj.v[c] += dir.ds[k - 1].v[c];
        out.r_hj.push_back(std::move(hj));

        CellField comp(setup.coarse());
        for (std::size_t c = 0; c < comp.size(); ++c)
            comp.v[c] = state.s[k - 1].v[c] * dir.drho[k - 1].v[c] +
                        state.rho[k].v[c] * dir.ds[k - 1].v[c];
        out.r_comp.push_back(std::move(comp));
    }

    out.norm = spacetime_block_norm(out.r_cont, tau);
    out.norm = std::max(out.norm, spacetime_block_norm(out.r_hj, tau));
    out.norm = std::max(out.norm, spacetime_block_norm(out.r_comp, tau));
    return out;
}

} // namespace otfv
