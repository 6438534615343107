#pragma once

#include "otfv/fields.hpp"
#include "otfv/mesh.hpp"

namespace otfv {

enum class ReconKind { Linear, Harmonic };

const char* to_string(ReconKind kind);

// Weighted inner products: <a,b>_T = sum a_K b_K m_K on cells,
// <u,v>_Sigma = sum u v m_sigma d_sigma on diamonds; the flux product reduces
// to the diamond one under signed single-scalar storage.
double inner_cell(const CellField& a, const CellField& b);
double inner_diamond(const DiamondField& u, const DiamondField& v);
double inner_flux(const FluxField& f, const FluxField& g);

// div_K F = (1/m_K) sum_sigma F_{K,sigma} m_sigma; zero-flux boundary built in.
CellField divergence(const FluxField& f);

// (grad a)_{K,sigma} = (a_L - a_K)/d_sigma; adjoint of -div in the weighted
// products.
FluxField gradient(const CellField& a);

// Piecewise-constant prolongation (I rho)_K = rho_{Kbar} and its adjoint
// (I* b)_{Kbar} = sum_{K in Kbar} b_K m_K / m_{Kbar}.
CellField inject(const CellField& coarse, const NestedMeshPair& pair);
CellField inject_adjoint(const CellField& fine, const NestedMeshPair& pair);

// Linear / harmonic weighted means from cells to diamonds. The harmonic mean
// extends continuously by 0 where a_K a_L = 0 and requires a >= 0.
DiamondField reconstruct(const CellField& a, ReconKind kind);

// Differential dR[a] applied to da (equals the linear mean for Linear kind;
// requires a > 0 for Harmonic).
DiamondField reconstruct_diff(const CellField& a, const CellField& da, ReconKind kind);

// Adjoint (dR[a])* u with respect to the weighted products.
CellField reconstruct_diff_adjoint(const CellField& a, const DiamondField& u, ReconKind kind);

// R_Tbar[a] = I* o (dR[I a])*, the coarse-grid reconstruction operator.
CellField reconstruct_coarse_adjoint(const CellField& a_coarse, const DiamondField& u, ReconKind kind,
                                     const NestedMeshPair& pair);

// d/de|_0 (dR[a + e da])* u; identically zero for the linear kind.
CellField reconstruct_second_diff_action(const CellField& a, const DiamondField& u, const CellField& da,
                                         ReconKind kind);

// Per-face coefficients of dR[a]: dR[a]b = ck*b_K + cl*b_L. Used by the
// Newton assembly; requires a > 0 for Harmonic.
void recon_diff_coeffs(const CellField& a, ReconKind kind, std::vector<double>& ck,
                       std::vector<double>& cl);

} // namespace otfv
