#include "otfv/export.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "otfv/errors.hpp"

namespace otfv {

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

void write_vtk_frame(const Mesh& mesh, const std::vector<double>& values, const std::string& field,
                     const std::string& path) {
    std::ostringstream os;
    os << "# vtk DataFile Version 3.0\n" << field << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.vertices.size() << " double\n";
    char buf[128];
    for (const Vec2& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", v.x, v.y);
        os << buf;
    }
    std::size_t list = 0;
    for (const auto& loop : mesh.cells) list += loop.size() + 1;
    os << "CELLS " << mesh.cells.size() << " " << list << "\n";
    for (const auto& loop : mesh.cells) {
        os << loop.size();
        for (int32_t v : loop) os << " " << v;
        os << "\n";
    }
    os << "CELL_TYPES " << mesh.cells.size() << "\n";
    for (const auto& loop : mesh.cells) os << (loop.size() == 3 ? 5 : loop.size() == 4 ? 9 : 7) << "\n";
    os << "CELL_DATA " << mesh.cells.size() << "\n";
    os << "SCALARS " << field << " double 1\nLOOKUP_TABLE default\n";
    for (double x : values) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        os << buf;
    }
    write_text_file(path, os.str());
}

namespace {

std::string csv_field(const CellField& f) {
    std::ostringstream os;
    os << "cell,value\n";
    char buf[64];
    for (std::size_t c = 0; c < f.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", c, f.v[c]);
        os << buf;
    }
    return os.str();
}

} // namespace

void write_solution_bundle(const Solution& sol, const TransportSetup& setup, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const int N = setup.N;
    char buf[256];

    std::snprintf(buf, sizeof buf, "w2 %.17g\ngap_bound %.17g\nconverged %d\nfinal_mu %.17g\n",
                  sol.w2, sol.final_mu * setup.N / (setup.N + 1.0) * setup.omega(),
                  sol.converged ? 1 : 0, sol.final_mu);
    write_text_file(dir + "/w2.txt", buf);

    for (int k = 0; k <= N + 1; ++k) {
        std::snprintf(buf, sizeof buf, "%s/rho_%03d.csv", dir.c_str(), k);
        write_text_file(buf, csv_field(sol.state.rho[k]));
    }
    for (int k = 1; k <= N + 1; ++k) {
        std::snprintf(buf, sizeof buf, "%s/phi_%03d.csv", dir.c_str(), k);
        write_text_file(buf, csv_field(sol.state.phi[k - 1]));
    }

    {
        std::ostringstream os;
        os << "outer,mu,backoff,newton_iters,final_residual,gap_bound,action,w2,min_rho,min_s\n";
        for (std::size_t i = 0; i < sol.trace.outer.size(); ++i) {
            const OuterIterInfo& oi = sol.trace.outer[i];
            std::snprintf(buf, sizeof buf, "%zu,%.9e,%d,%d,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e\n", i,
                          oi.mu, oi.backoff ? 1 : 0, oi.newton_iters, oi.final_residual,
                          oi.gap_bound, oi.action, oi.w2, oi.min_rho, oi.min_s);
            os << buf;
        }
        write_text_file(dir + "/trace.csv", os.str());
    }

    // Density frames on the coarse mesh, one per time slice.
    std::ostringstream series;
    series << "{\n  \"file-series-version\" : \"1.0\",\n  \"files\" : [\n";
    for (int k = 0; k <= N + 1; ++k) {
        std::snprintf(buf, sizeof buf, "frame_%03d.vtk", k);
        const std::string name = buf;
        write_vtk_frame(setup.coarse(), sol.state.rho[k].v, "rho", dir + "/" + name);
        std::snprintf(buf, sizeof buf, "    { \"name\" : \"%s\", \"time\" : %.17g }%s\n",
                      name.c_str(), k * setup.tau(), k <= N ? "," : "");
        series << buf;
    }
    series << "  ]\n}\n";
    write_text_file(dir + "/frames.vtk-series", series.str());
}

std::string hash_string(const std::string& content) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : content) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for hashing: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return hash_string(os.str());
}

} // namespace otfv
