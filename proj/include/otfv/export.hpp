#pragma once

#include <string>
#include <vector>

#include "otfv/analysis.hpp"
#include "otfv/solver.hpp"

namespace otfv {

// Legacy ASCII VTK unstructured grid with one CELL_DATA scalar.
void write_vtk_frame(const Mesh& mesh, const std::vector<double>& values, const std::string& field,
                     const std::string& path);

// Full solution bundle: w2.txt, rho_<k>.csv / phi_<k>.csv per slice,
// trace.csv and one VTK density frame per time slice plus a series index.
void write_solution_bundle(const Solution& sol, const TransportSetup& setup, const std::string& dir);

void write_text_file(const std::string& path, const std::string& content);

// FNV-1a over a file's bytes, for run manifests.
std::string hash_file(const std::string& path);
std::string hash_string(const std::string& content);

} // namespace otfv
