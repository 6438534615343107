#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "otfv/errors.hpp"
#include "otfv/mesh.hpp"

namespace otfv {

namespace {

struct LineReader {
    std::istream& in;
    long lineno = 0;
    // Returns false at EOF; skips blank lines and '#' comments.
    bool next(std::string& out) {
        while (std::getline(in, out)) {
            ++lineno;
            std::size_t i = 0;
            while (i < out.size() && std::isspace(static_cast<unsigned char>(out[i]))) ++i;
            if (i == out.size() || out[i] == '#') continue;
            return true;
        }
        return false;
    }
};

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh file: " + path);
    LineReader rd{in};
    std::string line;

    if (!rd.next(line)) throw ParseError("empty mesh file", rd.lineno);
    {
        std::istringstream ss(line);
        std::string tag;
        int version = 0;
        ss >> tag >> version;
        if (tag != "tpfa-mesh" || version != 1) throw ParseError("expected header 'tpfa-mesh 1'", rd.lineno);
    }

    auto expect_section = [&](const char* name, std::size_t& count) {
        if (!rd.next(line)) throw ParseError(std::string("expected '") + name + " <n>'", rd.lineno);
        std::istringstream ss(line);
        std::string tag;
        long long n = -1;
        ss >> tag >> n;
        if (tag != name || n < 0) throw ParseError(std::string("expected '") + name + " <n>'", rd.lineno);
        count = static_cast<std::size_t>(n);
    };

    std::size_t nv = 0;
    expect_section("vertices", nv);
    std::vector<Vec2> vertices(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        if (!rd.next(line)) throw ParseError("unexpected end of vertex list", rd.lineno);
        std::istringstream ss(line);
        if (!(ss >> vertices[i].x >> vertices[i].y)) throw ParseError("bad vertex line", rd.lineno);
    }

    std::size_t ncell = 0;
    expect_section("cells", ncell);
    std::vector<std::vector<int32_t>> cells(ncell);
    for (std::size_t c = 0; c < ncell; ++c) {
        if (!rd.next(line)) throw ParseError("unexpected end of cell list", rd.lineno);
        std::istringstream ss(line);
        long long v;
        while (ss >> v) {
            if (v < 0 || v >= static_cast<long long>(nv))
                throw ParseError("vertex index out of range", rd.lineno);
            cells[c].push_back(static_cast<int32_t>(v));
        }
        if (cells[c].size() < 3) throw ParseError("cell with fewer than 3 vertices", rd.lineno);
        std::vector<Vec2> poly;
        for (int32_t vi : cells[c]) poly.push_back(vertices[vi]);
        if (polygon_area(poly) <= 0.0) throw ParseError("cell is not counter-clockwise", rd.lineno);
    }

    std::vector<Vec2> centers;
    if (rd.next(line)) {
        std::istringstream ss(line);
        std::string tag;
        long long n = -1;
        ss >> tag >> n;
        if (tag != "centers" || n != static_cast<long long>(ncell))
            throw ParseError("expected 'centers <m>' with one center per cell", rd.lineno);
        centers.resize(ncell);
        for (std::size_t c = 0; c < ncell; ++c) {
            if (!rd.next(line)) throw ParseError("unexpected end of center list", rd.lineno);
            std::istringstream cs(line);
            if (!(cs >> centers[c].x >> centers[c].y)) throw ParseError("bad center line", rd.lineno);
        }
    } else {
        // Defaults: circumcenters for triangles, centroids for rectangles.
        centers.resize(ncell);
        for (std::size_t c = 0; c < ncell; ++c) {
            const auto& loop = cells[c];
            if (loop.size() == 3) {
                centers[c] = circumcenter(vertices[loop[0]], vertices[loop[1]], vertices[loop[2]]);
            } else if (loop.size() == 4) {
                std::vector<Vec2> poly{vertices[loop[0]], vertices[loop[1]], vertices[loop[2]],
                                       vertices[loop[3]]};
                centers[c] = polygon_vertex_mean(poly);
            } else {
                throw ParseError("centers section required for non-triangle/quad cells", rd.lineno);
            }
        }
    }

    Mesh mesh = make_mesh(std::move(vertices), std::move(cells), std::move(centers));
    validate(mesh); // throws AdmissibilityViolation on bad geometry
    return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write mesh file: " + path);
    out << "tpfa-mesh 1\n";
    out << "vertices " << mesh.vertices.size() << "\n";
    for (const Vec2& v : mesh.vertices) out << fmt17(v.x) << " " << fmt17(v.y) << "\n";
    out << "cells " << mesh.cells.size() << "\n";
    for (const auto& loop : mesh.cells) {
        for (std::size_t i = 0; i < loop.size(); ++i) out << (i ? " " : "") << loop[i];
        out << "\n";
    }
    out << "centers " << mesh.centers.size() << "\n";
    for (const Vec2& c : mesh.centers) out << fmt17(c.x) << " " << fmt17(c.y) << "\n";
    if (!out) throw Error("write failed: " + path);
}

void save_pair(const NestedMeshPair& pair, const std::string& base) {
    save_mesh(*pair.coarse, base + ".coarse.txt");
    save_mesh(*pair.fine, base + ".fine.txt");
    std::ofstream out(base + ".map.txt");
    if (!out) throw Error("cannot write map file: " + base + ".map.txt");
    out << "tpfa-map 1\n";
    out << "pairs " << pair.parent.size() << "\n";
    for (int32_t p : pair.parent) out << p << "\n";
}

NestedMeshPair load_pair(const std::string& base) {
    NestedMeshPair pair;
    pair.coarse = std::make_shared<Mesh>(load_mesh(base + ".coarse.txt"));
    pair.fine = std::make_shared<Mesh>(load_mesh(base + ".fine.txt"));
    std::ifstream in(base + ".map.txt");
    if (!in) throw Error("cannot open map file: " + base + ".map.txt");
    LineReader rd{in};
    std::string line;
    if (!rd.next(line)) throw ParseError("empty map file", rd.lineno);
    {
        std::istringstream ss(line);
        std::string tag;
        int version = 0;
        ss >> tag >> version;
        if (tag != "tpfa-map" || version != 1) throw ParseError("expected header 'tpfa-map 1'", rd.lineno);
    }
    if (!rd.next(line)) throw ParseError("expected 'pairs <n>'", rd.lineno);
    std::size_t n = 0;
    {
        std::istringstream ss(line);
        std::string tag;
        long long v = -1;
        ss >> tag >> v;
        if (tag != "pairs" || v < 0) throw ParseError("expected 'pairs <n>'", rd.lineno);
        n = static_cast<std::size_t>(v);
    }
    if (n != pair.fine->n_cells()) throw Error("map size does not match fine mesh");
    pair.parent.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rd.next(line)) throw ParseError("unexpected end of map", rd.lineno);
        std::istringstream ss(line);
        long long p = -1;
        if (!(ss >> p) || p < 0 || p >= static_cast<long long>(pair.coarse->n_cells()))
            throw ParseError("bad containment entry", rd.lineno);
        pair.parent[i] = static_cast<int32_t>(p);
    }
    pair.identical = false;
    validate(pair);
    return pair;
}

} // namespace otfv
