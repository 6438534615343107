#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "otfv/solver.hpp"

namespace otfv {

// Reusable Newton system for one TransportSetup: the sparsity pattern and the
// symbolic factorization are computed once, each step only refills values and
// refactorizes numerically.
class NewtonKkt {
public:
    explicit NewtonKkt(const TransportSetup& setup);

    NewtonDirection direction(const SpaceTimeState& state, const KKTResidual& res);

    struct SliceData {
        CellField mid;              // coarse midpoint density
        CellField a;                // inject(mid), fine
        DiamondField recon;         // R(a)
        FluxField grad;             // grad phi^k
        std::vector<double> ck, cl; // dR[a] face coefficients
    };
    std::vector<SliceData> build_slices(const SpaceTimeState& state) const;

private:
    template <class Emit>
    void emit_entries(const SpaceTimeState& state, const std::vector<SliceData>& sl,
                      Emit&& emit) const;

    const TransportSetup* setup_;
    Eigen::Index nf_ = 0, nc_ = 0, n_phi_ = 0, n_rho_ = 0, dim_ = 0;
    bool pattern_ready_ = false;
    Eigen::SparseMatrix<double> matrix_;
    std::vector<Eigen::Index> slots_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

} // namespace otfv
