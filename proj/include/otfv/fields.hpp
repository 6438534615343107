#pragma once

#include <vector>

#include "otfv/errors.hpp"
#include "otfv/mesh.hpp"

namespace otfv {

// One real per cell of the referenced mesh. Fields hold a non-owning mesh
// pointer; meshes live in NestedMeshPair (shared_ptr) and outlive the fields.
struct CellField {
    const Mesh* mesh = nullptr;
    std::vector<double> v;

    CellField() = default;
    explicit CellField(const Mesh& m, double init = 0.0) : mesh(&m), v(m.n_cells(), init) {}
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

// One real per internal face (diamond cell) of the fine mesh.
struct DiamondField {
    const Mesh* mesh = nullptr;
    std::vector<double> v;

    DiamondField() = default;
    explicit DiamondField(const Mesh& m, double init = 0.0) : mesh(&m), v(m.n_faces(), init) {}
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

// Conservative flux: one signed real per oriented internal face, the value
// F_{K,sigma} in the stored K->L orientation (F_{L,sigma} = -F_{K,sigma}).
struct FluxField {
    const Mesh* mesh = nullptr;
    std::vector<double> v;

    FluxField() = default;
    explicit FluxField(const Mesh& m, double init = 0.0) : mesh(&m), v(m.n_faces(), init) {}
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

inline void require_same_mesh(const Mesh* a, const Mesh* b, const char* what) {
    if (a == nullptr || a != b) throw MeshMismatch(what);
}

} // namespace otfv
