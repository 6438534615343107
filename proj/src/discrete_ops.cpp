#include "otfv/discrete_ops.hpp"

#include <algorithm>
#include <cmath>

#include "otfv/kernels.hpp"

namespace otfv {

const char* to_string(ReconKind kind) { return kind == ReconKind::Linear ? "linear" : "harmonic"; }

double inner_cell(const CellField& a, const CellField& b) {
    require_same_mesh(a.mesh, b.mesh, "inner_cell: fields on different meshes");
    return kernels::weighted_dot(a.v.data(), b.v.data(), a.mesh->measures.data(), a.size());
}

double inner_diamond(const DiamondField& u, const DiamondField& v) {
    require_same_mesh(u.mesh, v.mesh, "inner_diamond: fields on different meshes");
    return kernels::weighted_dot(u.v.data(), v.v.data(), u.mesh->face_md.data(), u.size());
}

double inner_flux(const FluxField& f, const FluxField& g) {
    require_same_mesh(f.mesh, g.mesh, "inner_flux: fields on different meshes");
    return kernels::weighted_dot(f.v.data(), g.v.data(), f.mesh->face_md.data(), f.size());
}

CellField divergence(const FluxField& f) {
    const Mesh& m = *f.mesh;
    CellField out(m);
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        double s = 0.0;
        for (int32_t j = m.cell_face_offset[c]; j < m.cell_face_offset[c + 1]; ++j) {
            const int32_t fi = m.cell_face_index[j];
            s += m.cell_face_sign[j] * f.v[fi] * m.face_m[fi];
        }
        out.v[c] = s / m.measures[c];
    }
    return out;
}

FluxField gradient(const CellField& a) {
    const Mesh& m = *a.mesh;
    FluxField g(m);
    kernels::face_gradient(a.v.data(), m.face_k.data(), m.face_l.data(), m.face_inv_d.data(),
                           g.v.data(), m.n_faces());
    return g;
}

CellField inject(const CellField& coarse, const NestedMeshPair& pair) {
    require_same_mesh(coarse.mesh, pair.coarse.get(), "inject: field not on coarse mesh");
    CellField out(*pair.fine);
    for (std::size_t c = 0; c < out.size(); ++c) out.v[c] = coarse.v[pair.parent[c]];
    return out;
}

CellField inject_adjoint(const CellField& fine, const NestedMeshPair& pair) {
    require_same_mesh(fine.mesh, pair.fine.get(), "inject_adjoint: field not on fine mesh");
    CellField out(*pair.coarse);
    const Mesh& fm = *pair.fine;
    for (std::size_t c = 0; c < fine.size(); ++c) out.v[pair.parent[c]] += fine.v[c] * fm.measures[c];
    for (std::size_t p = 0; p < out.size(); ++p) out.v[p] /= pair.coarse->measures[p];
    return out;
}

DiamondField reconstruct(const CellField& a, ReconKind kind) {
    const Mesh& m = *a.mesh;
    DiamondField r(m);
    if (kind == ReconKind::Linear) {
        kernels::recon_linear(a.v.data(), m.face_k.data(), m.face_l.data(), m.face_wk.data(),
                              m.face_wl.data(), r.v.data(), m.n_faces());
    } else {
        for (double x : a.v)
            if (x < 0.0) throw NegativeDensity("harmonic reconstruction requires a >= 0");
        kernels::recon_harmonic(a.v.data(), m.face_k.data(), m.face_l.data(), m.face_d.data(),
                                m.face_dk.data(), m.face_dl.data(), r.v.data(), m.n_faces());
    }
    return r;
}

void recon_diff_coeffs(const CellField& a, ReconKind kind, std::vector<double>& ck,
                       std::vector<double>& cl) {
    const Mesh& m = *a.mesh;
    const std::size_t nf = m.n_faces();
    ck.resize(nf);
    cl.resize(nf);
    if (kind == ReconKind::Linear) {
        std::copy(m.face_wk.begin(), m.face_wk.end(), ck.begin());
        std::copy(m.face_wl.begin(), m.face_wl.end(), cl.begin());
        return;
    }
    for (double x : a.v)
        if (x <= 0.0) throw ZeroDensity("harmonic differential requires a > 0");
    // dH/da_K = (d_K/d) H^2/a_K^2, same with K <-> L.
    for (std::size_t f = 0; f < nf; ++f) {
        const double ak = a.v[m.face_k[f]];
        const double al = a.v[m.face_l[f]];
        const double den = m.face_dk[f] * al + m.face_dl[f] * ak;
        const double h = m.face_d[f] * ak * al / den;
        ck[f] = m.face_wk[f] * (h / ak) * (h / ak);
        cl[f] = m.face_wl[f] * (h / al) * (h / al);
    }
}

DiamondField reconstruct_diff(const CellField& a, const CellField& da, ReconKind kind) {
    require_same_mesh(a.mesh, da.mesh, "reconstruct_diff: fields on different meshes");
    const Mesh& m = *a.mesh;
    DiamondField out(m);
    if (kind == ReconKind::Linear) {
        kernels::recon_linear(da.v.data(), m.face_k.data(), m.face_l.data(), m.face_wk.data(),
                              m.face_wl.data(), out.v.data(), m.n_faces());
        return out;
    }
    std::vector<double> ck, cl;
    recon_diff_coeffs(a, kind, ck, cl);
    for (std::size_t f = 0; f < m.n_faces(); ++f)
        out.v[f] = ck[f] * da.v[m.face_k[f]] + cl[f] * da.v[m.face_l[f]];
    return out;
}

CellField reconstruct_diff_adjoint(const CellField& a, const DiamondField& u, ReconKind kind) {
    require_same_mesh(a.mesh, u.mesh, "reconstruct_diff_adjoint: fields on different meshes");
    const Mesh& m = *a.mesh;
    std::vector<double> ck, cl;
    recon_diff_coeffs(a, kind, ck, cl);
    CellField out(m);
    // ((dR[a])* u)_K = sum_sigma (dR/da_K) u m d / m_K; with dR/da_K = w_K*(...)
    // this is the eq:adjoint_means form sum u m_sigma d_{K,sigma} (...) / m_K.
    for (std::size_t f = 0; f < m.n_faces(); ++f) {
        const double w = u.v[f] * m.face_md[f];
        out.v[m.face_k[f]] += ck[f] * w;
        out.v[m.face_l[f]] += cl[f] * w;
    }
    for (std::size_t c = 0; c < m.n_cells(); ++c) out.v[c] /= m.measures[c];
    return out;
}

CellField reconstruct_coarse_adjoint(const CellField& a_coarse, const DiamondField& u, ReconKind kind,
                                     const NestedMeshPair& pair) {
    require_same_mesh(a_coarse.mesh, pair.coarse.get(),
                      "reconstruct_coarse_adjoint: density not on coarse mesh");
    const CellField af = inject(a_coarse, pair);
    return inject_adjoint(reconstruct_diff_adjoint(af, u, kind), pair);
}

CellField reconstruct_second_diff_action(const CellField& a, const DiamondField& u, const CellField& da,
                                         ReconKind kind) {
    require_same_mesh(a.mesh, da.mesh, "reconstruct_second_diff_action: fields on different meshes");
    require_same_mesh(a.mesh, u.mesh, "reconstruct_second_diff_action: fields on different meshes");
    const Mesh& m = *a.mesh;
    CellField out(m);
    if (kind == ReconKind::Linear) return out;
    for (double x : a.v)
        if (x <= 0.0) throw ZeroDensity("harmonic second differential requires a > 0");
    // Differentiates G_K = H^2/a_K^2 in the adjoint sum:
    //   dG_K = (2H/a_K^2) dH - (2H^2/a_K^3) da_K,  dH = hK da_K + hL da_L.
    for (std::size_t f = 0; f < m.n_faces(); ++f) {
        const int32_t K = m.face_k[f];
        const int32_t L = m.face_l[f];
        const double ak = a.v[K];
        const double al = a.v[L];
        const double den = m.face_dk[f] * al + m.face_dl[f] * ak;
        const double h = m.face_d[f] * ak * al / den;
        const double hk = m.face_wk[f] * (h / ak) * (h / ak);
        const double hl = m.face_wl[f] * (h / al) * (h / al);
        const double dh = hk * da.v[K] + hl * da.v[L];
        const double gk = (2.0 * h / (ak * ak)) * dh - (2.0 * h * h / (ak * ak * ak)) * da.v[K];
        const double gl = (2.0 * h / (al * al)) * dh - (2.0 * h * h / (al * al * al)) * da.v[L];
        out.v[K] += gk * u.v[f] * m.face_m[f] * m.face_dk[f];
        out.v[L] += gl * u.v[f] * m.face_m[f] * m.face_dl[f];
    }
    for (std::size_t c = 0; c < m.n_cells(); ++c) out.v[c] /= m.measures[c];
    return out;
}

} // namespace otfv
