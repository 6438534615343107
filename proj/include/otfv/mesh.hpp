#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "otfv/geometry.hpp"

namespace otfv {

// Internal face sigma = K|L with a fixed orientation K -> L. The unit normal
// points from K to L, so one signed scalar per face represents a conservative
// flux (F_{L,sigma} = -F_{K,sigma} implied).
struct InternalFace {
    int32_t k = -1, l = -1;       // adjacent cells, orientation k -> l
    double m = 0.0;               // face measure m_sigma (edge length)
    double d = 0.0;               // d_sigma = |x_L - x_K|
    double dk = 0.0, dl = 0.0;    // distances cell center -> face midpoint
    Vec2 normal;                  // unit, k -> l
    int32_t va = -1, vb = -1;     // endpoint vertex indices
};

struct BoundaryFace {
    int32_t k = -1;
    double m = 0.0;
    double dk = 0.0;
    Vec2 normal;                  // unit, outward
    int32_t va = -1, vb = -1;
};

// Admissible TPFA mesh: polygonal control volumes with cell centers such that
// for every internal face the segment x_L - x_K is orthogonal to the face.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::vector<int32_t>> cells;   // CCW vertex index loops
    std::vector<Vec2> centers;                 // x_K
    std::vector<double> measures;              // m_K
    std::vector<InternalFace> faces;
    std::vector<BoundaryFace> boundary;
    double total_area = 0.0;                   // |Omega| = sum m_K
    double h_max = 0.0;                        // max cell diameter

    // Struct-of-arrays face geometry for the kernels layer.
    std::vector<int32_t> face_k, face_l;
    std::vector<double> face_m, face_d, face_dk, face_dl;
    std::vector<double> face_inv_d;            // 1/d_sigma
    std::vector<double> face_wk, face_wl;      // d_K/d, d_L/d
    std::vector<double> face_md;               // m_sigma d_sigma

    // Per-cell incidence over internal faces: sign +1 where the cell is K.
    std::vector<int32_t> cell_face_offset;     // size n_cells()+1
    std::vector<int32_t> cell_face_index;
    std::vector<double> cell_face_sign;

    std::size_t n_cells() const { return cells.size(); }
    std::size_t n_faces() const { return faces.size(); }
};

// Builds derived geometry (measures, faces, SoA arrays) from vertices, cells
// and centers. Does not check admissibility; see validate().
Mesh make_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int32_t>> cells,
               std::vector<Vec2> centers);

// Coarse triangulation + fine subdivision linked by a containment map.
// `identical` marks the non-enriched scheme where both meshes are one object.
struct NestedMeshPair {
    std::shared_ptr<const Mesh> coarse;
    std::shared_ptr<const Mesh> fine;
    std::vector<int32_t> parent;   // fine cell -> coarse cell
    bool identical = false;
};

struct MeshQuality {
    double zeta = 0.0;                        // regularity constant of eq. diam(K) <= zeta d_sigma
    double eta_h = 0.0;                       // isotropy defect (internal faces)
    double max_center_of_mass_defect = 0.0;   // Frobenius defect, all faces
    double h = 0.0;
    double hbar = 0.0;
};

// nx*ny axis-aligned rectangles of the unit square, centroid centers.
Mesh generate_cartesian(int nx, int ny);

// Rows of isoceles triangles with base = height = 1/n, alternating
// apex-up/apex-down, 2n^2 cells, all angles strictly acute; cell centers are
// circumcenters. The meshed domain has unit area; its left/right boundaries
// zigzag by 1/(2n) around x=0 and x=1 (an exact tiling of the square by such
// triangles does not exist).
Mesh generate_acute_triangulation(int n);

// Splits each acute triangle into three quadrilaterals joining the
// circumcenter to the edge midpoints. Each quad is cyclic with diameter
// (vertex, circumcenter), so its circumcenter is the midpoint of that
// segment, which becomes the fine cell center. Throws NotAcute if a coarse
// angle is >= 90 degrees.
NestedMeshPair subdivide_to_nested(const Mesh& coarse);

// coarse == fine, containment = identity (non-enriched scheme).
NestedMeshPair identical_pair(const Mesh& mesh);

// Measures regularity constants; throws AdmissibilityViolation (listing the
// offending faces) if orthogonality or face-distance sums fail tolerance.
MeshQuality validate(const Mesh& mesh);
MeshQuality validate(const NestedMeshPair& pair);

// Max over cells of the relative spread of vertex distances to the stored
// center (0 for cells inscribed in a circle about their center).
double max_cocircularity_defect(const Mesh& mesh);

// Text format: header "tpfa-mesh 1"; "vertices <n>" + n lines "x y";
// "cells <m>" + m lines of CCW 0-based vertex indices; optional
// "centers <m>" + m lines "x y". Full precision (17 significant digits).
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

// Pair is stored as <base>.coarse.txt, <base>.fine.txt, <base>.map.txt.
void save_pair(const NestedMeshPair& pair, const std::string& base);
NestedMeshPair load_pair(const std::string& base);

} // namespace otfv
