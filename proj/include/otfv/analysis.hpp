#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "otfv/problem.hpp"
#include "otfv/solver.hpp"

namespace otfv {

// Reference problem: exact density rho(t,x,y), optionally the Kantorovich
// potential and the exact distance. Qualitative cases carry boundary data
// only (no convergence metrics).
struct AnalyticCase {
    std::string name;
    std::function<double(double, double, double)> rho;
    std::function<double(double, double, double)> phi; // may be empty
    std::optional<double> w2_exact;
    bool qualitative = false;
    std::string notes;

    bool has_phi() const { return static_cast<bool>(phi); }
};

AnalyticCase translation_case();
AnalyticCase compression_case(double c);
AnalyticCase sinusoidal_case();
AnalyticCase cross_case();
std::vector<AnalyticCase> builtin_cases();
AnalyticCase find_case(const std::string& name, double c);

enum class SamplingMode { Center, Average };

// Boundary-data sampler at time t in {0, 1}; Average uses a degree-2
// quadrature on a centroid fan of the cell.
CellField sample_density_bc(const AnalyticCase& cs, const Mesh& coarse, double t,
                            SamplingMode mode = SamplingMode::Center);

struct BoundaryData {
    CellField rho_in, rho_f;
    bool rescaled = false;       // sampled masses differed beyond 1e-12 relative
    double factor_in = 1.0, factor_f = 1.0;
};

// Samples both slices and rescales them to the common mean mass when needed
// (the discrete problem requires exactly equal masses).
BoundaryData sample_boundary_pair(const AnalyticCase& cs, const Mesh& coarse,
                                  SamplingMode mode = SamplingMode::Center);

TransportSetup make_case_setup(const AnalyticCase& cs, const NestedMeshPair& pair, int N,
                               ReconKind kind, SamplingMode mode = SamplingMode::Center);

// Mid-slab samples phi^k_K = phi(t^{k-1} + tau/2, x_K) on the fine mesh,
// k = 1..N+1, and likewise for the density.
struct SpaceTimeSamples {
    std::vector<CellField> phi_ref;
    std::vector<CellField> rho_ref;
};
SpaceTimeSamples sample_spacetime(const AnalyticCase& cs, const TransportSetup& setup);

enum class EpsRhoMode { Coarse, Fine };

struct ErrorReport {
    double eps_w2 = 0.0;
    double eps_phi = 0.0;
    double eps_grad_phi = 0.0;
    double eps_rho = 0.0;
    double hbar = 0.0;
    int N = 0;
    std::string scheme, kind;
};

// The four error metrics; the discrete potential is first shifted by the
// constant zeroing the density-weighted space-time mean of (phi~ - phi).
ErrorReport errors(const Solution& sol, const AnalyticCase& cs, const TransportSetup& setup,
                   EpsRhoMode rho_mode = EpsRhoMode::Coarse);

enum class Scheme { Enriched, NonEnriched };

const char* to_string(Scheme s);

// Acute-family pair at resolution n: coarse triangulation subdivided for the
// enriched scheme, identical pair otherwise.
NestedMeshPair build_pair(int n, Scheme scheme);

struct LevelSpec {
    int n = 0; // acute-generator resolution; hbar ~ sqrt(5)/(2n)
    int N = 0;
};

struct ConvergenceRow {
    double hbar = 0.0;
    int N = 0;
    ErrorReport err;
    bool has_rates = false;
    double rate_w2 = 0.0, rate_phi = 0.0, rate_gphi = 0.0, rate_rho = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::string scheme, kind, case_name;
    std::string to_csv() const;
    std::string to_text() const;
};

struct StudyOptions {
    Scheme scheme = Scheme::NonEnriched;
    ReconKind kind = ReconKind::Linear;
    SolverParams params;        // eps0 = 1e-8 is the convergence-test setting
    SamplingMode sampling = SamplingMode::Center;
    EpsRhoMode eps_rho_mode = EpsRhoMode::Coarse;
    int workers = 1;
};

ConvergenceTable convergence_study(const AnalyticCase& cs, const std::vector<LevelSpec>& levels,
                                   const StudyOptions& opt);

// Spurious-oscillation indicator: excess discrete total variation of the
// mid-time density slice over a reference TV (exact midpoint slice when the
// case has one, otherwise the larger boundary-slice TV), normalized by the
// reference. Comparable between schemes on identical levels.
double oscillation_index(const Solution& sol, const TransportSetup& setup,
                         const AnalyticCase* exact = nullptr);

} // namespace otfv
