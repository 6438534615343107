#pragma once

#include <vector>

#include "otfv/discrete_ops.hpp"
#include "otfv/fields.hpp"
#include "otfv/mesh.hpp"

namespace otfv {

// Boundary densities live on the coarse mesh and must carry the same total
// discrete mass. tau = 1/(N+1).
struct TransportSetup {
    const NestedMeshPair* pair = nullptr;
    int N = 0;
    ReconKind kind = ReconKind::Linear;
    CellField rho_in, rho_f;

    double tau() const { return 1.0 / (N + 1); }
    const Mesh& coarse() const { return *pair->coarse; }
    const Mesh& fine() const { return *pair->fine; }
    double omega() const { return pair->coarse->total_area; }
};

// Throws on negative densities or a mass mismatch beyond 1e-12 relative.
TransportSetup make_setup(const NestedMeshPair& pair, int N, ReconKind kind, CellField rho_in,
                          CellField rho_f);

// Unknowns staggered in time: rho on slices 0..N+1 (0 and N+1 pinned to the
// boundary data), phi on slices 1..N+1 (fine mesh), slack s on slices 1..N.
struct SpaceTimeState {
    std::vector<CellField> phi;
    std::vector<CellField> rho;
    std::vector<CellField> s;
};

// phi = 0, interior rho = uniform with the problem's mass, s = mu0/rho.
SpaceTimeState initial_state(const TransportSetup& setup, double mu0);

struct KKTResidual {
    std::vector<CellField> r_cont; // N+1 fine slices
    std::vector<CellField> r_hj;   // N coarse slices
    std::vector<CellField> r_comp; // N coarse slices
    double norm = 0.0;             // max over blocks of sqrt(tau sum_k ||.||^2)
};

// Kinetic density B(p, Q) = |Q|^2 / 2p, 0 at (0,0), +inf otherwise.
double kinetic_density(double p, double q);

// Discrete Benamou-Brenier functional; +inf if any rho cell is negative or a
// flux crosses a face with zero reconstructed density.
double action(const std::vector<CellField>& rho, const std::vector<FluxField>& flux,
              const TransportSetup& setup);

// I((rho^k - rho^{k-1})/tau) + div F^k per slice k = 1..N+1.
std::vector<CellField> continuity_residual(const std::vector<CellField>& rho,
                                           const std::vector<FluxField>& flux,
                                           const TransportSetup& setup);

// F^k = (R o I)((rho^k + rho^{k-1})/2) .* grad phi^k.
std::vector<FluxField> flux_from_potential(const std::vector<CellField>& rho,
                                           const std::vector<CellField>& phi,
                                           const TransportSetup& setup);

KKTResidual kkt_residual(const SpaceTimeState& state, double mu, const TransportSetup& setup);

// W with W^2/2 = (tau/2) sum_k <(R o I) mid^k, (grad phi^k)^2>_Sigma.
double discrete_w2(const std::vector<CellField>& rho, const std::vector<CellField>& phi,
                   const TransportSetup& setup);

// Dual objective in phi; linear reconstruction only (UnsupportedKind else).
// Feasibility of phi (the discrete HJ inequality) is the caller's concern.
double dual_objective(const std::vector<CellField>& phi, const TransportSetup& setup);

// J(rho) = sum_{k=1..N} tau sum_K -log(rho^k_K) m_K; +inf on the boundary of
// the positive orthant.
double barrier_value(const std::vector<CellField>& rho, const TransportSetup& setup);

// Block norms used by KKTResidual::norm.
double spacetime_block_norm(const std::vector<CellField>& slices, double tau);

// Shared helper: coarse midpoint (rho^k + rho^{k-1})/2 for k = 1..N+1.
CellField midpoint_density(const std::vector<CellField>& rho, int k);

} // namespace otfv
