#include <doctest.h>

#include "oracles.hpp"
#include "otfv/discrete_ops.hpp"

using namespace otfv;

TEST_CASE("inner products: hand values") {
    const Mesh unit = generate_cartesian(1, 1);
    CellField one(unit, 1.0);
    CHECK(inner_cell(one, one) == doctest::Approx(1.0).epsilon(1e-15));
    CellField zero(unit, 0.0);
    CHECK(inner_cell(zero, one) == 0.0);

    const Mesh two = generate_cartesian(2, 1);
    CellField a(two), b(two);
    a.v = {1.0, 2.0};
    b.v = {3.0, 4.0};
    CHECK(inner_cell(a, b) == doctest::Approx(5.5).epsilon(1e-15));

    DiamondField u(two, 1.0), v(two, 1.0);
    CHECK(inner_diamond(u, v) == doctest::Approx(0.5).epsilon(1e-15));

    FluxField f(two, 1.0), g(two, 1.0);
    CHECK(inner_flux(f, g) == doctest::Approx(0.5).epsilon(1e-15));
    // Flipping the orientation convention on both operands leaves it unchanged.
    FluxField fn(two, -1.0), gn(two, -1.0);
    CHECK(inner_flux(fn, gn) == inner_flux(f, g));
}

TEST_CASE("inner products: mesh mismatch") {
    const Mesh m1 = generate_cartesian(2, 1);
    const Mesh m2 = generate_cartesian(2, 1);
    CHECK_THROWS_AS(inner_cell(CellField(m1, 1.0), CellField(m2, 1.0)), MeshMismatch);
}

TEST_CASE("inner products: bilinearity") {
    const Mesh m = generate_cartesian(3, 3);
    auto g = oracles::rng(7);
    const DiamondField u = oracles::random_diamond_field(m, g, -1, 1);
    const DiamondField v = oracles::random_diamond_field(m, g, -1, 1);
    DiamondField u2 = u;
    for (double& x : u2.v) x *= 2.0;
    CHECK(inner_diamond(u2, v) == doctest::Approx(2.0 * inner_diamond(u, v)).epsilon(1e-14));
}

TEST_CASE("divergence: hand value and conservativity") {
    const Mesh two = generate_cartesian(2, 1);
    FluxField f(two, 0.7);
    const CellField d = divergence(f);
    CHECK(d.v[0] == doctest::Approx(2.0 * 0.7).epsilon(1e-14));
    CHECK(d.v[1] == doctest::Approx(-2.0 * 0.7).epsilon(1e-14));

    const Mesh m = generate_acute_triangulation(3);
    auto g = oracles::rng(11);
    const FluxField r = oracles::random_flux_field(m, g, -1, 1);
    const CellField dv = divergence(r);
    double total = 0.0, scale = 0.0;
    for (std::size_t c = 0; c < m.n_cells(); ++c) total += dv.v[c] * m.measures[c];
    for (double x : r.v) scale = std::max(scale, std::abs(x));
    CHECK(std::abs(total) <= 1e-14 * scale);
}

TEST_CASE("gradient: hand value, constants, adjointness") {
    const Mesh two = generate_cartesian(2, 1);
    CellField a(two);
    a.v = {0.0, 1.0};
    const FluxField g = gradient(a);
    CHECK(g.v[0] == doctest::Approx(2.0).epsilon(1e-14));

    for (const Mesh& m : {generate_cartesian(4, 4), generate_acute_triangulation(4)}) {
        CellField c(m, 3.25);
        const FluxField gc = gradient(c);
        for (double x : gc.v) CHECK(x == 0.0);

        auto rg = oracles::rng(13);
        for (int trial = 0; trial < 100; ++trial) {
            const CellField b = oracles::random_cell_field(m, rg, -2, 2);
            const FluxField f = oracles::random_flux_field(m, rg, -2, 2);
            const double lhs = inner_flux(gradient(b), f);
            const double rhs = -inner_cell(b, divergence(f));
            CHECK(oracles::rel_gap(lhs, rhs) <= 1e-13);
        }
    }
}

TEST_CASE("inject / inject_adjoint") {
    const NestedMeshPair pair = subdivide_to_nested(generate_acute_triangulation(1));
    CellField a(*pair.coarse);
    a.v = {1.0, 2.0};
    const CellField fine = inject(a, pair);
    CHECK(fine.v == std::vector<double>{1, 1, 1, 2, 2, 2});

    // Mass preservation and min/max bounds of the prolongation.
    CellField one_c(*pair.coarse, 1.0);
    CellField one_f(*pair.fine, 1.0);
    CHECK(inner_cell(a, one_c) == doctest::Approx(inner_cell(fine, one_f)).epsilon(1e-14));

    const CellField back = inject_adjoint(fine, pair);
    CHECK(back.v[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(back.v[1] == doctest::Approx(2.0).epsilon(1e-14));

    auto g = oracles::rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const CellField ac = oracles::random_cell_field(*pair.coarse, g, -2, 2);
        const CellField bf = oracles::random_cell_field(*pair.fine, g, -2, 2);
        const double lhs = inner_cell(inject_adjoint(bf, pair), ac);
        const double rhs = inner_cell(bf, inject(ac, pair));
        CHECK(oracles::rel_gap(lhs, rhs) <= 1e-13);
    }

    const NestedMeshPair id = identical_pair(generate_cartesian(3, 2));
    auto g2 = oracles::rng(19);
    const CellField x = oracles::random_cell_field(*id.coarse, g2, -1, 1);
    CHECK(inject(x, id).v == x.v);
    CHECK(inject_adjoint(x, id).v == x.v);
}

TEST_CASE("reconstruct: means and limits") {
    const Mesh two = generate_cartesian(2, 1);
    CellField a(two);

    a.v = {4.5, 4.5};
    CHECK(reconstruct(a, ReconKind::Linear).v[0] == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(reconstruct(a, ReconKind::Harmonic).v[0] == doctest::Approx(4.5).epsilon(1e-15));

    a.v = {1.0, 3.0};
    CHECK(reconstruct(a, ReconKind::Linear).v[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(reconstruct(a, ReconKind::Harmonic).v[0] == doctest::Approx(1.5).epsilon(1e-15));

    a.v = {1.0, 0.0};
    CHECK(reconstruct(a, ReconKind::Harmonic).v[0] == 0.0);

    a.v = {1.0, -0.5};
    CHECK_THROWS_AS(reconstruct(a, ReconKind::Harmonic), NegativeDensity);
}

TEST_CASE("reconstruct: homogeneity, concavity, ordering") {
    const Mesh m = generate_acute_triangulation(3);
    auto g = oracles::rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const CellField a = oracles::random_cell_field(m, g, 0.0, 2.0);
        const CellField b = oracles::random_cell_field(m, g, 0.1, 2.0);
        for (ReconKind kind : {ReconKind::Linear, ReconKind::Harmonic}) {
            const DiamondField ra = reconstruct(a, kind);
            CellField a3 = a;
            for (double& x : a3.v) x *= 3.0;
            const DiamondField ra3 = reconstruct(a3, kind);
            for (std::size_t f = 0; f < ra.size(); ++f)
                CHECK(ra3.v[f] == doctest::Approx(3.0 * ra.v[f]).epsilon(1e-14));
        }
        // harmonic <= linear componentwise; harmonic concave.
        const DiamondField lin = reconstruct(a, ReconKind::Linear);
        const DiamondField har = reconstruct(a, ReconKind::Harmonic);
        for (std::size_t f = 0; f < lin.size(); ++f) CHECK(har.v[f] <= lin.v[f] + 1e-14);

        CellField mid(m);
        for (std::size_t c = 0; c < m.n_cells(); ++c) mid.v[c] = 0.5 * (a.v[c] + b.v[c]);
        const DiamondField hm = reconstruct(mid, ReconKind::Harmonic);
        const DiamondField hb = reconstruct(b, ReconKind::Harmonic);
        for (std::size_t f = 0; f < hm.size(); ++f)
            CHECK(hm.v[f] >= 0.5 * har.v[f] + 0.5 * hb.v[f] - 1e-12);
    }
}

TEST_CASE("reconstruct_diff_adjoint: hand values and adjoint identity") {
    const Mesh m = generate_cartesian(3, 3);
    // linear, u = 1: values sum_sigma m_sigma d_{K,sigma} / m_K per cell.
    DiamondField u1(m, 1.0);
    CellField any(m, 1.0);
    const CellField lin = reconstruct_diff_adjoint(any, u1, ReconKind::Linear);
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        double expect = 0.0;
        for (int32_t j = m.cell_face_offset[c]; j < m.cell_face_offset[c + 1]; ++j) {
            const int32_t f = m.cell_face_index[j];
            expect += m.face_m[f] * (m.cell_face_sign[j] > 0 ? m.face_dk[f] : m.face_dl[f]);
        }
        CHECK(lin.v[c] == doctest::Approx(expect / m.measures[c]).epsilon(1e-14));
    }

    // harmonic at a constant coincides with the linear adjoint.
    CellField c2(m, 2.0);
    const CellField harc = reconstruct_diff_adjoint(c2, u1, ReconKind::Harmonic);
    for (std::size_t c = 0; c < m.n_cells(); ++c)
        CHECK(harc.v[c] == doctest::Approx(lin.v[c]).epsilon(1e-14));

    CellField with_zero(m, 1.0);
    with_zero.v[0] = 0.0;
    CHECK_THROWS_AS(reconstruct_diff_adjoint(with_zero, u1, ReconKind::Harmonic), ZeroDensity);

    auto g = oracles::rng(29);
    for (ReconKind kind : {ReconKind::Linear, ReconKind::Harmonic}) {
        for (int trial = 0; trial < 100; ++trial) {
            const CellField a = oracles::random_cell_field(m, g, 0.2, 2.0);
            const CellField b = oracles::random_cell_field(m, g, -1.0, 1.0);
            const DiamondField u = oracles::random_diamond_field(m, g, -1.0, 1.0);
            const double lhs = inner_cell(reconstruct_diff_adjoint(a, u, kind), b);
            const double rhs = inner_diamond(u, reconstruct_diff(a, b, kind));
            CHECK(oracles::rel_gap(lhs, rhs) <= 1e-13);
        }
    }
}

TEST_CASE("reconstruct_diff vs finite differences of reconstruct") {
    const Mesh m = generate_acute_triangulation(3);
    auto g = oracles::rng(31);
    for (ReconKind kind : {ReconKind::Linear, ReconKind::Harmonic}) {
        const CellField a = oracles::random_cell_field(m, g, 0.5, 2.0);
        const CellField da = oracles::random_cell_field(m, g, -1.0, 1.0);
        const DiamondField analytic = reconstruct_diff(a, da, kind);
        const double err = oracles::best_fd_error(
            [&](double h) {
                CellField ah = a;
                for (std::size_t c = 0; c < ah.size(); ++c) ah.v[c] += h * da.v[c];
                return reconstruct(ah, kind).v;
            },
            analytic.v);
        CHECK(err <= 1e-6);
    }
}

TEST_CASE("reconstruct_second_diff_action") {
    const Mesh m = generate_acute_triangulation(3);
    auto g = oracles::rng(37);
    const CellField a = oracles::random_cell_field(m, g, 0.5, 2.0);
    const CellField da = oracles::random_cell_field(m, g, -1.0, 1.0);
    const DiamondField u = oracles::random_diamond_field(m, g, -1.0, 1.0);

    // Linear kind: identically zero, any inputs.
    const CellField zl = reconstruct_second_diff_action(a, u, da, ReconKind::Linear);
    for (double x : zl.v) CHECK(x == 0.0);

    // Harmonic with da = 0: zero.
    CellField zero(m, 0.0);
    const CellField zh = reconstruct_second_diff_action(a, u, zero, ReconKind::Harmonic);
    for (double x : zh.v) CHECK(x == 0.0);

    // Harmonic vs central differences of reconstruct_diff_adjoint.
    const CellField analytic = reconstruct_second_diff_action(a, u, da, ReconKind::Harmonic);
    const double err = oracles::best_fd_error(
        [&](double h) {
            CellField ah = a;
            for (std::size_t c = 0; c < ah.size(); ++c) ah.v[c] += h * da.v[c];
            return reconstruct_diff_adjoint(ah, u, ReconKind::Harmonic).v;
        },
        analytic.v);
    CHECK(err <= 1e-6);
}

TEST_CASE("reconstruct_coarse_adjoint") {
    const NestedMeshPair pair = subdivide_to_nested(generate_acute_triangulation(2));
    auto g = oracles::rng(41);

    // u = 0 -> 0.
    const CellField a0 = oracles::random_cell_field(*pair.coarse, g, 0.5, 1.5);
    const CellField z = reconstruct_coarse_adjoint(a0, DiamondField(*pair.fine, 0.0),
                                                   ReconKind::Harmonic, pair);
    for (double x : z.v) CHECK(x == 0.0);

    // Identical pair, linear kind: equals reconstruct_diff_adjoint.
    const NestedMeshPair id = identical_pair(generate_cartesian(3, 3));
    const CellField ai = oracles::random_cell_field(*id.coarse, g, 0.5, 1.5);
    const DiamondField ui = oracles::random_diamond_field(*id.fine, g, -1, 1);
    const CellField ra = reconstruct_coarse_adjoint(ai, ui, ReconKind::Linear, id);
    const CellField rb = reconstruct_diff_adjoint(ai, ui, ReconKind::Linear);
    for (std::size_t c = 0; c < ra.size(); ++c)
        CHECK(ra.v[c] == doctest::Approx(rb.v[c]).epsilon(1e-14));

    // Adjoint chain identity against inject + reconstruct_diff.
    for (ReconKind kind : {ReconKind::Linear, ReconKind::Harmonic}) {
        for (int trial = 0; trial < 100; ++trial) {
            const CellField a = oracles::random_cell_field(*pair.coarse, g, 0.3, 2.0);
            const CellField b = oracles::random_cell_field(*pair.coarse, g, -1.0, 1.0);
            const DiamondField u = oracles::random_diamond_field(*pair.fine, g, -1.0, 1.0);
            const double lhs = inner_cell(reconstruct_coarse_adjoint(a, u, kind, pair), b);
            const double rhs =
                inner_diamond(u, reconstruct_diff(inject(a, pair), inject(b, pair), kind));
            CHECK(oracles::rel_gap(lhs, rhs) <= 1e-13);
        }
    }
}
