#include "otfv/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "otfv/errors.hpp"

namespace otfv {

namespace {

struct EdgeKey {
    int32_t a, b; // sorted
    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};
struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const {
        return std::hash<int64_t>()((static_cast<int64_t>(k.a) << 32) ^ k.b);
    }
};

std::vector<Vec2> cell_polygon(const Mesh& m, std::size_t c) {
    std::vector<Vec2> poly;
    poly.reserve(m.cells[c].size());
    for (int32_t v : m.cells[c]) poly.push_back(m.vertices[v]);
    return poly;
}

} // namespace

Mesh make_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int32_t>> cells,
               std::vector<Vec2> centers) {
    Mesh m;
    m.vertices = std::move(vertices);
    m.cells = std::move(cells);
    m.centers = std::move(centers);
    if (m.centers.size() != m.cells.size())
        throw Error("make_mesh: one center per cell required");

    const std::size_t nc = m.cells.size();
    m.measures.resize(nc);
    m.total_area = 0.0;
    m.h_max = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
        const auto poly = cell_polygon(m, c);
        const double a = polygon_area(poly);
        if (a <= 0.0) throw Error("make_mesh: cell " + std::to_string(c) + " not CCW or degenerate");
        m.measures[c] = a;
        m.total_area += a;
        m.h_max = std::max(m.h_max, polygon_diameter(poly));
    }

    // Face discovery in deterministic (cell, local edge) order. An edge seen
    // once so far is provisionally boundary; a second incidence makes it
    // internal with orientation first-cell -> second-cell.
    struct PendingEdge {
        int32_t cell, va, vb; // va -> vb in the CCW traversal of `cell`
    };
    std::unordered_map<EdgeKey, int32_t, EdgeKeyHash> seen; // -> index into pending
    std::vector<PendingEdge> pending;
    std::vector<std::pair<int32_t, int32_t>> matches; // (pending idx, second cell) in discovery order

    std::vector<char> matched;
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& loop = m.cells[c];
        const std::size_t nv = loop.size();
        for (std::size_t i = 0; i < nv; ++i) {
            const int32_t va = loop[i];
            const int32_t vb = loop[(i + 1) % nv];
            const EdgeKey key{std::min(va, vb), std::max(va, vb)};
            auto it = seen.find(key);
            if (it == seen.end()) {
                seen.emplace(key, static_cast<int32_t>(pending.size()));
                pending.push_back({static_cast<int32_t>(c), va, vb});
                matched.push_back(0);
            } else {
                const int32_t pi = it->second;
                if (matched[pi]) throw Error("make_mesh: edge shared by more than two cells");
                matched[pi] = 1;
                matches.emplace_back(pi, static_cast<int32_t>(c));
            }
        }
    }

    for (const auto& [pi, cl] : matches) {
        const PendingEdge& pe = pending[pi];
        InternalFace f;
        f.k = pe.cell;
        f.l = cl;
        f.va = pe.va;
        f.vb = pe.vb;
        const Vec2 A = m.vertices[pe.va];
        const Vec2 B = m.vertices[pe.vb];
        const Vec2 mid = 0.5 * (A + B);
        f.m = norm(B - A);
        const Vec2 xk = m.centers[f.k];
        const Vec2 xl = m.centers[f.l];
        f.d = norm(xl - xk);
        f.dk = norm(xk - mid);
        f.dl = norm(xl - mid);
        f.normal = f.d > 0.0 ? (1.0 / f.d) * (xl - xk) : Vec2{0.0, 0.0};
        m.faces.push_back(f);
    }
    for (std::size_t pi = 0; pi < pending.size(); ++pi) {
        if (matched[pi]) continue;
        const PendingEdge& pe = pending[pi];
        BoundaryFace f;
        f.k = pe.cell;
        f.va = pe.va;
        f.vb = pe.vb;
        const Vec2 A = m.vertices[pe.va];
        const Vec2 B = m.vertices[pe.vb];
        f.m = norm(B - A);
        f.dk = norm(m.centers[f.k] - 0.5 * (A + B));
        // CCW traversal va -> vb means outward is the right-hand perpendicular.
        const Vec2 t = (1.0 / f.m) * (B - A);
        f.normal = {t.y, -t.x};
        m.boundary.push_back(f);
    }

    // SoA mirrors and per-cell incidence.
    const std::size_t nf = m.faces.size();
    m.face_k.resize(nf);
    m.face_l.resize(nf);
    m.face_m.resize(nf);
    m.face_d.resize(nf);
    m.face_dk.resize(nf);
    m.face_dl.resize(nf);
    m.face_inv_d.resize(nf);
    m.face_wk.resize(nf);
    m.face_wl.resize(nf);
    m.face_md.resize(nf);
    std::vector<int32_t> counts(nc, 0);
    for (std::size_t i = 0; i < nf; ++i) {
        const InternalFace& f = m.faces[i];
        m.face_k[i] = f.k;
        m.face_l[i] = f.l;
        m.face_m[i] = f.m;
        m.face_d[i] = f.d;
        m.face_dk[i] = f.dk;
        m.face_dl[i] = f.dl;
        m.face_inv_d[i] = f.d > 0.0 ? 1.0 / f.d : 0.0;
        m.face_wk[i] = f.d > 0.0 ? f.dk / f.d : 0.0;
        m.face_wl[i] = f.d > 0.0 ? f.dl / f.d : 0.0;
        m.face_md[i] = f.m * f.d;
        ++counts[f.k];
        ++counts[f.l];
    }
    m.cell_face_offset.assign(nc + 1, 0);
    for (std::size_t c = 0; c < nc; ++c) m.cell_face_offset[c + 1] = m.cell_face_offset[c] + counts[c];
    m.cell_face_index.resize(m.cell_face_offset[nc]);
    m.cell_face_sign.resize(m.cell_face_offset[nc]);
    std::vector<int32_t> cursor(m.cell_face_offset.begin(), m.cell_face_offset.end() - 1);
    for (std::size_t i = 0; i < nf; ++i) {
        const InternalFace& f = m.faces[i];
        m.cell_face_index[cursor[f.k]] = static_cast<int32_t>(i);
        m.cell_face_sign[cursor[f.k]++] = 1.0;
        m.cell_face_index[cursor[f.l]] = static_cast<int32_t>(i);
        m.cell_face_sign[cursor[f.l]++] = -1.0;
    }
    return m;
}

Mesh generate_cartesian(int nx, int ny) {
    if (nx < 1 || ny < 1) throw Error("generate_cartesian: nx, ny >= 1 required");
    const double hx = 1.0 / nx;
    const double hy = 1.0 / ny;
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) vertices.push_back({i * hx, j * hy});
    auto vid = [nx](int i, int j) { return static_cast<int32_t>(j * (nx + 1) + i); };
    std::vector<std::vector<int32_t>> cells;
    std::vector<Vec2> centers;
    cells.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
            centers.push_back({(i + 0.5) * hx, (j + 0.5) * hy});
        }
    return make_mesh(std::move(vertices), std::move(cells), std::move(centers));
}

Mesh generate_acute_triangulation(int n) {
    if (n < 1) throw Error("generate_acute_triangulation: n >= 1 required");
    const double h = 1.0 / n;
    // Vertex rows alternate between integer and half-offset abscissae, so each
    // strip of 2n isoceles triangles leans opposite to its neighbours.
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int r = 0; r <= n; ++r) {
        const double off = (r % 2 == 0) ? 0.0 : 0.5 * h;
        for (int i = 0; i <= n; ++i) vertices.push_back({i * h + off, r * h});
    }
    auto vid = [n](int r, int i) { return static_cast<int32_t>(r * (n + 1) + i); };

    std::vector<std::vector<int32_t>> cells;
    std::vector<Vec2> centers;
    cells.reserve(static_cast<std::size_t>(2) * n * n);
    auto push = [&](int32_t a, int32_t b, int32_t c) {
        cells.push_back({a, b, c});
        centers.push_back(circumcenter(vertices[a], vertices[b], vertices[c]));
    };
    for (int r = 0; r < n; ++r) {
        if (r % 2 == 0) {
            // Bottom on integer offsets, top half-shifted right.
            for (int i = 0; i < n; ++i) push(vid(r, i), vid(r, i + 1), vid(r + 1, i));
            for (int i = 0; i < n; ++i) push(vid(r + 1, i + 1), vid(r + 1, i), vid(r, i + 1));
        } else {
            // Bottom half-shifted, top back on integer offsets.
            for (int i = 0; i < n; ++i) push(vid(r, i), vid(r, i + 1), vid(r + 1, i + 1));
            for (int i = 0; i < n; ++i) push(vid(r + 1, i + 1), vid(r + 1, i), vid(r, i));
        }
    }
    return make_mesh(std::move(vertices), std::move(cells), std::move(centers));
}

NestedMeshPair subdivide_to_nested(const Mesh& coarse) {
    const std::size_t nc = coarse.n_cells();
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& loop = coarse.cells[c];
        if (loop.size() != 3)
            throw NotAcute("subdivide_to_nested: cell " + std::to_string(c) + " is not a triangle");
        for (int i = 0; i < 3; ++i) {
            const Vec2 p = coarse.vertices[loop[i]];
            const Vec2 q = coarse.vertices[loop[(i + 1) % 3]];
            const Vec2 r = coarse.vertices[loop[(i + 2) % 3]];
            if (dot(q - p, r - p) <= 0.0)
                throw NotAcute("subdivide_to_nested: angle >= 90 degrees in cell " + std::to_string(c));
        }
    }

    std::vector<Vec2> fvert = coarse.vertices;
    std::unordered_map<int64_t, int32_t> midpoint_id;
    auto midpoint = [&](int32_t a, int32_t b) {
        const int64_t key = (static_cast<int64_t>(std::min(a, b)) << 32) | std::max(a, b);
        auto it = midpoint_id.find(key);
        if (it != midpoint_id.end()) return it->second;
        const int32_t id = static_cast<int32_t>(fvert.size());
        fvert.push_back(0.5 * (coarse.vertices[a] + coarse.vertices[b]));
        midpoint_id.emplace(key, id);
        return id;
    };

    std::vector<std::vector<int32_t>> fcells;
    std::vector<Vec2> fcenters;
    std::vector<int32_t> parent;
    fcells.reserve(3 * nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& loop = coarse.cells[c];
        const Vec2 O = coarse.centers[c];
        const int32_t oid = static_cast<int32_t>(fvert.size());
        fvert.push_back(O);
        for (int i = 0; i < 3; ++i) {
            const int32_t a = loop[i];
            const int32_t b = loop[(i + 1) % 3];
            const int32_t p = loop[(i + 2) % 3];
            // Quad at vertex a: (a, mid(a,b), O, mid(p,a)); cyclic with right
            // angles at the midpoints, so the circumcenter is mid(a, O).
            fcells.push_back({a, midpoint(a, b), oid, midpoint(p, a)});
            fcenters.push_back(0.5 * (coarse.vertices[a] + O));
            parent.push_back(static_cast<int32_t>(c));
        }
    }

    NestedMeshPair pair;
    pair.coarse = std::make_shared<Mesh>(coarse);
    pair.fine = std::make_shared<Mesh>(make_mesh(std::move(fvert), std::move(fcells), std::move(fcenters)));
    pair.parent = std::move(parent);
    pair.identical = false;
    return pair;
}

NestedMeshPair identical_pair(const Mesh& mesh) {
    NestedMeshPair pair;
    pair.coarse = std::make_shared<Mesh>(mesh);
    pair.fine = pair.coarse;
    pair.parent.resize(mesh.n_cells());
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) pair.parent[c] = static_cast<int32_t>(c);
    pair.identical = true;
    return pair;
}

namespace {

// Largest eigenvalue of a symmetric 2x2 matrix.
double sym_eig_max(double a, double b, double c) { // [[a, b], [b, c]]
    const double tr = 0.5 * (a + c);
    const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    return tr + disc;
}

} // namespace

MeshQuality validate(const Mesh& mesh) {
    constexpr double orth_tol = 1e-10;
    constexpr double sum_tol = 1e-12;
    std::ostringstream bad;
    int nbad = 0;
    for (std::size_t i = 0; i < mesh.n_faces(); ++i) {
        const InternalFace& f = mesh.faces[i];
        const Vec2 A = mesh.vertices[f.va];
        const Vec2 B = mesh.vertices[f.vb];
        const Vec2 t = (1.0 / f.m) * (B - A);
        const Vec2 seg = mesh.centers[f.l] - mesh.centers[f.k];
        bool ok = f.d > 0.0;
        ok = ok && std::abs(dot(seg, t)) <= orth_tol * f.d;
        ok = ok && std::abs(f.dk + f.dl - f.d) <= sum_tol * f.d;
        if (!ok) {
            if (nbad < 8) bad << (nbad ? ", " : "") << i << " (cells " << f.k << "|" << f.l << ")";
            ++nbad;
        }
    }
    if (nbad > 0)
        throw AdmissibilityViolation("admissibility violated on " + std::to_string(nbad) +
                                     " face(s): " + bad.str());

    MeshQuality q;
    q.h = mesh.h_max;
    q.hbar = mesh.h_max;
    std::vector<double> diam(mesh.n_cells());
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        std::vector<Vec2> poly;
        for (int32_t v : mesh.cells[c]) poly.push_back(mesh.vertices[v]);
        diam[c] = polygon_diameter(poly);
        const double dist = distance_to_polygon(mesh.centers[c], poly);
        if (dist > 0.0) q.zeta = std::max(q.zeta, dist / diam[c]);
    }
    for (const InternalFace& f : mesh.faces) {
        for (int32_t c : {f.k, f.l}) {
            q.zeta = std::max(q.zeta, diam[c] / f.d);
            q.zeta = std::max(q.zeta, f.d / diam[c]);
        }
    }

    // eq:asyiso over internal faces; eq:asyiso2 defect over all faces.
    std::vector<std::array<double, 3>> iso(mesh.n_cells(), {0.0, 0.0, 0.0});
    std::vector<std::array<double, 3>> com(mesh.n_cells(), {0.0, 0.0, 0.0});
    auto add = [](std::array<double, 3>& M, Vec2 nrm, double w) {
        M[0] += w * nrm.x * nrm.x;
        M[1] += w * nrm.x * nrm.y;
        M[2] += w * nrm.y * nrm.y;
    };
    for (const InternalFace& f : mesh.faces) {
        add(iso[f.k], f.normal, f.m * f.dk);
        add(iso[f.l], f.normal, f.m * f.dl);
        add(com[f.k], f.normal, f.m * f.dk);
        add(com[f.l], f.normal, f.m * f.dl);
    }
    for (const BoundaryFace& f : mesh.boundary) add(com[f.k], f.normal, f.m * f.dk);
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const double mk = mesh.measures[c];
        q.eta_h = std::max(q.eta_h, sym_eig_max(iso[c][0] / mk - 1.0, iso[c][1] / mk, iso[c][2] / mk - 1.0));
        const double d0 = com[c][0] / mk - 1.0;
        const double d1 = com[c][1] / mk;
        const double d2 = com[c][2] / mk - 1.0;
        q.max_center_of_mass_defect =
            std::max(q.max_center_of_mass_defect, std::sqrt(d0 * d0 + 2.0 * d1 * d1 + d2 * d2));
    }
    q.eta_h = std::max(q.eta_h, 0.0);
    return q;
}

MeshQuality validate(const NestedMeshPair& pair) {
    const MeshQuality qc = validate(*pair.coarse);
    if (pair.identical) {
        return qc;
    }
    MeshQuality q = validate(*pair.fine);
    q.hbar = pair.coarse->h_max;
    q.zeta = std::max(q.zeta, qc.zeta);

    if (pair.parent.size() != pair.fine->n_cells())
        throw Error("nested pair: containment map size mismatch");
    std::vector<double> child_area(pair.coarse->n_cells(), 0.0);
    for (std::size_t c = 0; c < pair.fine->n_cells(); ++c) {
        const int32_t p = pair.parent[c];
        if (p < 0 || p >= static_cast<int32_t>(pair.coarse->n_cells()))
            throw Error("nested pair: containment map out of range");
        child_area[p] += pair.fine->measures[c];
        std::vector<Vec2> ppoly;
        for (int32_t v : pair.coarse->cells[p]) ppoly.push_back(pair.coarse->vertices[v]);
        for (int32_t v : pair.fine->cells[c])
            if (distance_to_polygon(pair.fine->vertices[v], ppoly) > 1e-10 * pair.coarse->h_max)
                throw Error("nested pair: fine cell " + std::to_string(c) + " not contained in coarse cell");
    }
    for (std::size_t p = 0; p < pair.coarse->n_cells(); ++p)
        if (std::abs(child_area[p] - pair.coarse->measures[p]) > 1e-12 * pair.coarse->measures[p])
            throw Error("nested pair: child areas do not sum to coarse area in cell " + std::to_string(p));
    return q;
}

double max_cocircularity_defect(const Mesh& mesh) {
    double worst = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        double rmin = std::numeric_limits<double>::infinity();
        double rmax = 0.0;
        for (int32_t v : mesh.cells[c]) {
            const double r = norm(mesh.vertices[v] - mesh.centers[c]);
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
        worst = std::max(worst, (rmax - rmin) / rmax);
    }
    return worst;
}

} // namespace otfv
