#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "otfv/errors.hpp"
#include "otfv/mesh.hpp"

using namespace otfv;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}
} // namespace

TEST_CASE("cartesian: degenerate single cell") {
    const Mesh m = generate_cartesian(1, 1);
    CHECK(m.n_cells() == 1);
    CHECK(m.n_faces() == 0);
    CHECK(m.measures[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.boundary.size() == 4);
}

TEST_CASE("cartesian: 2x1 face geometry") {
    const Mesh m = generate_cartesian(2, 1);
    REQUIRE(m.n_cells() == 2);
    REQUIRE(m.n_faces() == 1);
    const InternalFace& f = m.faces[0];
    CHECK(f.m == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.d == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.dk == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f.dl == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("cartesian: 4x4 counts and partition") {
    const Mesh m = generate_cartesian(4, 4);
    CHECK(m.n_cells() == 16);
    CHECK(m.n_faces() == 24); // 2 * 4 * 3 faces of the grid graph
    double total = 0.0;
    for (double a : m.measures) total += a;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    const MeshQuality q = validate(m);
    CHECK(q.eta_h <= 1e-12);
    CHECK(q.max_center_of_mass_defect <= 1e-12);
}

TEST_CASE("acute triangulation: n=1 angles") {
    const Mesh m = generate_acute_triangulation(1);
    REQUIRE(m.n_cells() == 2);
    // Isoceles with base = height: apex angle 2*atan(1/2), base angles atan(2).
    for (const auto& loop : m.cells) {
        REQUIRE(loop.size() == 3);
        for (int i = 0; i < 3; ++i) {
            const Vec2 p = m.vertices[loop[i]];
            const Vec2 q = m.vertices[loop[(i + 1) % 3]];
            const Vec2 r = m.vertices[loop[(i + 2) % 3]];
            const double ang =
                std::acos(dot(q - p, r - p) / (norm(q - p) * norm(r - p)));
            const bool apex = std::abs(ang - 2.0 * std::atan(0.5)) < 1e-12;
            const bool base = std::abs(ang - std::atan(2.0)) < 1e-12;
            CHECK((apex || base));
            CHECK(ang < 0.5 * kPi);
        }
    }
}

TEST_CASE("acute triangulation: partition of unit area") {
    const Mesh m = generate_acute_triangulation(2);
    CHECK(m.n_cells() == 8);
    double total = 0.0;
    for (double a : m.measures) total += a;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("acute triangulation: admissibility and circumcenter exactness") {
    const Mesh m = generate_acute_triangulation(4);
    CHECK(m.n_cells() == 32);
    const MeshQuality q = validate(m); // throws on violation
    CHECK(q.eta_h <= 1e-12);
    CHECK(q.max_center_of_mass_defect <= 1e-12);
    // Centers are circumcenters, strictly inside each triangle.
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        std::vector<Vec2> poly;
        for (int32_t v : m.cells[c]) poly.push_back(m.vertices[v]);
        CHECK(point_in_polygon(m.centers[c], poly));
    }
}

TEST_CASE("subdivision: two-triangle mesh gives six quads") {
    const Mesh coarse = generate_acute_triangulation(1);
    const NestedMeshPair pair = subdivide_to_nested(coarse);
    REQUIRE(pair.fine->n_cells() == 6);
    CHECK(pair.parent == std::vector<int32_t>{0, 0, 0, 1, 1, 1});
    // Fine centers are midpoints of (vertex, circumcenter) segments.
    for (std::size_t c = 0; c < pair.fine->n_cells(); ++c) {
        const int32_t p = pair.parent[c];
        const Vec2 O = pair.coarse->centers[p];
        const Vec2 A = pair.fine->vertices[pair.fine->cells[c][0]];
        const Vec2 mid = 0.5 * (A + O);
        CHECK(norm(pair.fine->centers[c] - mid) < 1e-14);
    }
    CHECK(max_cocircularity_defect(*pair.fine) < 1e-12);
    validate(pair);
}

TEST_CASE("subdivision: fine mesh is admissible and superadmissible") {
    const NestedMeshPair pair = subdivide_to_nested(generate_acute_triangulation(4));
    const MeshQuality q = validate(pair);
    CHECK(q.eta_h <= 1e-12);
    CHECK(q.max_center_of_mass_defect <= 1e-12);
    CHECK(max_cocircularity_defect(*pair.fine) < 1e-10);
    CHECK(q.hbar == doctest::Approx(pair.coarse->h_max));
    CHECK(q.h < q.hbar);
}

TEST_CASE("subdivision: right triangles rejected") {
    // Diagonal split of the square: right isoceles triangles.
    std::vector<Vec2> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<std::vector<int32_t>> cells{{0, 1, 2}, {0, 2, 3}};
    std::vector<Vec2> centers{{0.75, 0.25}, {0.25, 0.75}};
    const Mesh m = make_mesh(v, cells, centers);
    CHECK_THROWS_AS(subdivide_to_nested(m), NotAcute);
}

TEST_CASE("identical pair") {
    const NestedMeshPair pair = identical_pair(generate_cartesian(2, 2));
    CHECK(pair.identical);
    CHECK(pair.coarse.get() == pair.fine.get());
    CHECK(pair.parent == std::vector<int32_t>{0, 1, 2, 3});
}

TEST_CASE("validate: perturbed center breaks admissibility") {
    Mesh m = generate_cartesian(2, 2);
    std::vector<Vec2> centers = m.centers;
    centers[0].y += 0.07;
    const Mesh bad = make_mesh(m.vertices, m.cells, centers);
    CHECK_THROWS_AS(validate(bad), AdmissibilityViolation);
}

TEST_CASE("validate is pure") {
    const Mesh m = generate_acute_triangulation(3);
    const MeshQuality a = validate(m);
    const MeshQuality b = validate(m);
    CHECK(a.zeta == b.zeta);
    CHECK(a.eta_h == b.eta_h);
    CHECK(a.max_center_of_mass_defect == b.max_center_of_mass_defect);
}

TEST_CASE("mesh io: save/load round trip") {
    const std::string path = tmp_path("otfv_roundtrip.txt");
    const Mesh m = generate_cartesian(2, 1);
    save_mesh(m, path);
    const Mesh r = load_mesh(path);
    CHECK(r.vertices.size() == m.vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        CHECK(r.vertices[i].x == m.vertices[i].x);
        CHECK(r.vertices[i].y == m.vertices[i].y);
    }
    CHECK(r.cells == m.cells);
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        CHECK(r.centers[c].x == m.centers[c].x);
        CHECK(r.measures[c] == m.measures[c]);
    }
    REQUIRE(r.n_faces() == m.n_faces());
    CHECK(r.faces[0].d == m.faces[0].d);
}

TEST_CASE("mesh io: clockwise cell rejected with line number") {
    const std::string path = tmp_path("otfv_cw.txt");
    std::ofstream out(path);
    out << "tpfa-mesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ncells 1\n0 3 2 1\n";
    out.close();
    try {
        load_mesh(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 7);
    }
}

TEST_CASE("mesh io: hand-written acute fixture") {
    // The n=1 acute triangulation written by hand, centers omitted so the
    // loader falls back to circumcenters.
    const std::string path = tmp_path("otfv_acute1.txt");
    std::ofstream out(path);
    out << "tpfa-mesh 1\n"
        << "vertices 4\n0 0\n1 0\n0.5 1\n1.5 1\n"
        << "cells 2\n0 1 2\n3 2 1\n";
    out.close();
    const Mesh m = load_mesh(path);
    CHECK(m.n_cells() == 2);
    CHECK(m.n_faces() == 1);
    CHECK(m.centers[0].x == doctest::Approx(0.5));
    CHECK(m.centers[0].y == doctest::Approx(0.375));
}

TEST_CASE("mesh io: pair round trip") {
    const std::string base = tmp_path("otfv_pair");
    const NestedMeshPair pair = subdivide_to_nested(generate_acute_triangulation(2));
    save_pair(pair, base);
    const NestedMeshPair r = load_pair(base);
    CHECK(r.parent == pair.parent);
    CHECK(r.fine->n_cells() == pair.fine->n_cells());
}
