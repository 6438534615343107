// Command-line front end: mesh generation/validation, single solves,
// convergence studies, and frame export.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "otfv/analysis.hpp"
#include "otfv/export.hpp"
#include "otfv/kernels.hpp"
#include "otfv/mesh.hpp"
#include "otfv/solver.hpp"

namespace {

constexpr const char* kVersion = "wassersolve 1.0";

using namespace otfv;

struct SolverFlags {
    double mu0 = 1.0;
    double theta = 0.2;
    double eps0 = 1e-6;
    double alpha_min = 0.1;
    int n_max = 20;
    std::string delta0 = "gap";

    void attach(CLI::App* cmd) {
        cmd->add_option("--mu0", mu0, "initial barrier weight");
        cmd->add_option("--theta", theta, "barrier decay rate in (0,1)");
        cmd->add_option("--eps0", eps0, "outer tolerance");
        cmd->add_option("--alpha-min", alpha_min, "smallest accepted step fraction");
        cmd->add_option("--nmax", n_max, "max Newton steps per mu");
        cmd->add_option("--delta0", delta0, "stopping criterion: gap | residual")
            ->check(CLI::IsMember({"gap", "residual"}));
    }

    SolverParams params() const {
        SolverParams p;
        p.mu0 = mu0;
        p.theta = theta;
        p.eps0 = eps0;
        p.alpha_min = alpha_min;
        p.n_max = n_max;
        p.delta0_mode = delta0 == "residual" ? Delta0Mode::Residual : Delta0Mode::Gap;
        return p;
    }

    std::string echo() const {
        std::ostringstream os;
        os << "mu0 = " << mu0 << "\ntheta = " << theta << "\neps0 = " << eps0
           << "\nalpha_min = " << alpha_min << "\nnmax = " << n_max << "\ndelta0 = " << delta0
           << "\n";
        return os.str();
    }
};

ReconKind parse_kind(const std::string& s) {
    return s == "harmonic" ? ReconKind::Harmonic : ReconKind::Linear;
}

Scheme parse_scheme(const std::string& s) {
    return s == "enriched" ? Scheme::Enriched : Scheme::NonEnriched;
}

// "4:1,8:3" or "0.25:1,0.125:3" (hbar < 1 maps to n = round(1/hbar)).
std::vector<LevelSpec> parse_levels(const std::string& spec) {
    std::vector<LevelSpec> levels;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos) throw CLI::ValidationError("--levels", "expected n:N pairs");
        const double res = std::stod(item.substr(0, colon));
        LevelSpec lv;
        lv.n = res < 1.0 ? static_cast<int>(std::lround(1.0 / res)) : static_cast<int>(std::lround(res));
        lv.N = std::stoi(item.substr(colon + 1));
        if (lv.n < 1 || lv.N < 0) throw CLI::ValidationError("--levels", "bad level " + item);
        levels.push_back(lv);
    }
    return levels;
}

NestedMeshPair build_or_load_pair(const std::string& mesh_path, int n, Scheme scheme) {
    if (mesh_path.empty()) return build_pair(n, scheme);
    namespace fs = std::filesystem;
    if (fs::exists(mesh_path + ".coarse.txt")) return load_pair(mesh_path);
    return identical_pair(load_mesh(mesh_path));
}

int env_thread_cap() {
    const char* v = std::getenv("WASSERSOLVE_THREADS");
    if (!v) return 0;
    const int n = std::atoi(v);
    return n > 0 ? n : 0;
}

void write_manifest(const std::string& dir, const std::string& config_echo,
                    const std::vector<std::pair<std::string, std::string>>& hashes) {
    std::ostringstream os;
    os << kVersion << "\nkernels = " << kernels::active_mode_name() << "\n" << config_echo;
    for (const auto& [name, h] : hashes) os << "hash." << name << " = " << h << "\n";
    write_text_file(dir + "/manifest.txt", os.str());
}

int cmd_mesh_gen(const std::string& kind, int n, bool subdivide, const std::string& out) {
    Mesh mesh = kind == "cartesian" ? generate_cartesian(n, n) : generate_acute_triangulation(n);
    if (subdivide) {
        if (kind == "cartesian") {
            std::cerr << "mesh gen: --subdivide requires an acute triangulation\n";
            return 2;
        }
        const NestedMeshPair pair = subdivide_to_nested(mesh);
        std::string base = out;
        if (base.size() > 4 && base.ends_with(".txt")) base = base.substr(0, base.size() - 4);
        save_pair(pair, base);
        std::cout << "wrote " << base << ".coarse.txt, " << base << ".fine.txt, " << base
                  << ".map.txt\n";
    } else {
        save_mesh(mesh, out);
        std::cout << "wrote " << out << " (" << mesh.n_cells() << " cells, " << mesh.n_faces()
                  << " internal faces)\n";
    }
    return 0;
}

int cmd_mesh_check(const std::string& path) {
    try {
        const Mesh mesh = load_mesh(path);
        const MeshQuality q = validate(mesh);
        std::printf("cells                 %zu\n", mesh.n_cells());
        std::printf("internal faces        %zu\n", mesh.n_faces());
        std::printf("h                     %.6g\n", q.h);
        std::printf("zeta                  %.6g\n", q.zeta);
        std::printf("eta_h                 %.6g\n", q.eta_h);
        std::printf("center-of-mass defect %.6g\n", q.max_center_of_mass_defect);
        return 0;
    } catch (const AdmissibilityViolation& e) {
        std::cerr << "not admissible: " << e.what() << "\n";
        return 1;
    }
}

int cmd_solve(const std::string& case_name, double c, const std::string& mesh_path, int n, int N,
              const std::string& scheme_s, const std::string& kind_s, const std::string& sampling_s,
              const SolverFlags& flags, const std::string& out_dir) {
    const AnalyticCase cs = find_case(case_name, c);
    const Scheme scheme = parse_scheme(scheme_s);
    const NestedMeshPair pair = build_or_load_pair(mesh_path, n, scheme);
    const SamplingMode mode =
        sampling_s == "average" ? SamplingMode::Average : SamplingMode::Center;
    const TransportSetup setup = make_case_setup(cs, pair, N, parse_kind(kind_s), mode);

    const Solution sol = solve(setup, flags.params());
    write_solution_bundle(sol, setup, out_dir);

    std::ostringstream cfg;
    cfg << "command = solve\ncase = " << case_name << "\nc = " << c << "\nn = " << n
        << "\nN = " << N << "\nscheme = " << scheme_s << "\nkind = " << kind_s
        << "\nsampling = " << sampling_s << "\n"
        << flags.echo();
    std::ostringstream meshdump;
    {
        // Hash the coarse mesh serialization so the manifest pins the grid.
        const std::string tmp = out_dir + "/.mesh_hash_tmp.txt";
        save_mesh(*pair.coarse, tmp);
        meshdump << hash_file(tmp);
        std::filesystem::remove(tmp);
    }
    write_manifest(out_dir, cfg.str(), {{"coarse_mesh", meshdump.str()}});

    std::printf("w2 = %.12g  (converged = %d, final mu = %.3e)\n", sol.w2, sol.converged ? 1 : 0,
                sol.final_mu);
    if (!sol.converged) {
        std::cerr << "solver failed: " << sol.failure << "\n";
        return 1;
    }
    return 0;
}

int cmd_study(const std::string& case_name, double c, const std::string& levels_s,
              const std::string& scheme_s, const std::string& kind_s, bool compare_schemes,
              int workers, const SolverFlags& flags, const std::string& out_dir) {
    const AnalyticCase cs = find_case(case_name, c);
    const std::vector<LevelSpec> levels = parse_levels(levels_s);
    if (levels.empty()) {
        std::cerr << "study: empty level list\n";
        return 2;
    }
    const int cap = env_thread_cap();
    if (cap > 0) workers = std::min(workers, cap);

    std::vector<std::pair<Scheme, ReconKind>> combos;
    if (compare_schemes) {
        combos = {{Scheme::NonEnriched, ReconKind::Linear},
                  {Scheme::NonEnriched, ReconKind::Harmonic},
                  {Scheme::Enriched, ReconKind::Linear},
                  {Scheme::Enriched, ReconKind::Harmonic}};
    } else {
        combos = {{parse_scheme(scheme_s), parse_kind(kind_s)}};
    }

    std::filesystem::create_directories(out_dir);
    for (const auto& [scheme, kind] : combos) {
        StudyOptions opt;
        opt.scheme = scheme;
        opt.kind = kind;
        opt.params = flags.params();
        opt.workers = std::max(1, workers);
        const ConvergenceTable table = convergence_study(cs, levels, opt);
        const std::string stem = std::string(to_string(scheme)) + "_" + to_string(kind);
        write_text_file(out_dir + "/table_" + stem + ".csv", table.to_csv());
        write_text_file(out_dir + "/table_" + stem + ".txt", table.to_text());
        std::cout << table.to_text() << "\n";
    }

    std::ostringstream cfg;
    cfg << "command = study\ncase = " << case_name << "\nc = " << c << "\nlevels = " << levels_s
        << "\ncompare_schemes = " << (compare_schemes ? 1 : 0) << "\nworkers = " << workers << "\n"
        << flags.echo();
    write_manifest(out_dir, cfg.str(), {});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TPFA finite-volume solver for dynamic optimal transport"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "key = value configuration file");
    app.require_subcommand(1);

    // mesh gen / mesh check
    CLI::App* mesh = app.add_subcommand("mesh", "generate or inspect meshes");
    mesh->require_subcommand(1);
    CLI::App* gen = mesh->add_subcommand("gen", "generate a mesh");
    std::string gen_kind = "acute";
    int gen_n = 4;
    bool gen_subdivide = false;
    std::string gen_out = "mesh.txt";
    gen->add_option("--kind", gen_kind, "cartesian | acute")
        ->check(CLI::IsMember({"cartesian", "acute"}));
    gen->add_option("--n", gen_n, "resolution")->check(CLI::PositiveNumber);
    gen->add_flag("--subdivide", gen_subdivide, "emit the nested coarse/fine pair");
    gen->add_option("--out", gen_out, "output path")->required();

    CLI::App* check = mesh->add_subcommand("check", "validate a mesh file");
    std::string check_path;
    check->add_option("path", check_path, "mesh file")->required();

    // solve
    CLI::App* solve_cmd = app.add_subcommand("solve", "compute one geodesic");
    std::string sv_case = "translation", sv_scheme = "enriched", sv_kind = "linear";
    std::string sv_sampling = "center", sv_mesh, sv_out = "out";
    double sv_c = 0.3;
    int sv_n = 8, sv_N = 3;
    SolverFlags sv_flags;
    solve_cmd->add_option("--case", sv_case, "translation | compression | sinusoidal | cross")
        ->check(CLI::IsMember({"translation", "compression", "sinusoidal", "cross"}));
    solve_cmd->add_option("--c", sv_c, "compression factor");
    solve_cmd->add_option("--n", sv_n, "acute-generator resolution")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--N", sv_N, "interior time slices (tau = 1/(N+1))");
    solve_cmd->add_option("--scheme", sv_scheme, "enriched | non-enriched")
        ->check(CLI::IsMember({"enriched", "non-enriched"}));
    solve_cmd->add_option("--kind", sv_kind, "linear | harmonic")
        ->check(CLI::IsMember({"linear", "harmonic"}));
    solve_cmd->add_option("--sampling", sv_sampling, "center | average")
        ->check(CLI::IsMember({"center", "average"}));
    solve_cmd->add_option("--mesh", sv_mesh, "mesh file or pair base (overrides --n)");
    solve_cmd->add_option("--out", sv_out, "output directory");
    sv_flags.attach(solve_cmd);

    // study
    CLI::App* study_cmd = app.add_subcommand("study", "convergence study over levels");
    std::string st_case = "translation", st_levels = "4:1,8:3,16:7";
    std::string st_scheme = "non-enriched", st_kind = "linear", st_out = "study";
    double st_c = 0.3;
    bool st_compare = false;
    int st_workers = 1;
    SolverFlags st_flags;
    st_flags.eps0 = 1e-8; // convergence-test setting
    study_cmd->add_option("--case", st_case, "translation | compression | sinusoidal | cross")
        ->check(CLI::IsMember({"translation", "compression", "sinusoidal", "cross"}));
    study_cmd->add_option("--c", st_c, "compression factor");
    study_cmd->add_option("--levels", st_levels, "comma list of n:N (or hbar:N) pairs");
    study_cmd->add_option("--scheme", st_scheme, "enriched | non-enriched")
        ->check(CLI::IsMember({"enriched", "non-enriched"}));
    study_cmd->add_option("--kind", st_kind, "linear | harmonic")
        ->check(CLI::IsMember({"linear", "harmonic"}));
    study_cmd->add_flag("--compare-schemes", st_compare, "run all four scheme/kind combinations");
    study_cmd->add_option("--workers", st_workers, "parallel levels (capped by WASSERSOLVE_THREADS)");
    study_cmd->add_option("--out", st_out, "output directory");
    st_flags.attach(study_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_mesh_gen(gen_kind, gen_n, gen_subdivide, gen_out);
        if (check->parsed()) return cmd_mesh_check(check_path);
        if (solve_cmd->parsed())
            return cmd_solve(sv_case, sv_c, sv_mesh, sv_n, sv_N, sv_scheme, sv_kind, sv_sampling,
                             sv_flags, sv_out);
        if (study_cmd->parsed())
            return cmd_study(st_case, st_c, st_levels, st_scheme, st_kind, st_compare, st_workers,
                             st_flags, st_out);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
