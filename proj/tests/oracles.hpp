// Test-only oracles: finite differences, random fields, relative errors.
// Independent of the operator implementations they check.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "otfv/fields.hpp"
#include "otfv/mesh.hpp"

namespace oracles {

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline otfv::CellField random_cell_field(const otfv::Mesh& m, std::mt19937_64& g, double lo,
                                         double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    otfv::CellField f(m);
    for (double& x : f.v) x = d(g);
    return f;
}

inline otfv::DiamondField random_diamond_field(const otfv::Mesh& m, std::mt19937_64& g, double lo,
                                               double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    otfv::DiamondField f(m);
    for (double& x : f.v) x = d(g);
    return f;
}

inline otfv::FluxField random_flux_field(const otfv::Mesh& m, std::mt19937_64& g, double lo,
                                         double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    otfv::FluxField f(m);
    for (double& x : f.v) x = d(g);
    return f;
}

inline double rel_gap(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

// Central-difference directional derivative of a vector-valued map, swept
// over steps 1e-4..1e-7; returns the best relative error against `analytic`.
inline double best_fd_error(const std::function<std::vector<double>(double)>& eval_at,
                            const std::vector<double>& analytic) {
    double best = std::numeric_limits<double>::infinity();
    for (double h : {1e-4, 1e-5, 1e-6, 1e-7}) {
        const std::vector<double> plus = eval_at(h);
        const std::vector<double> minus = eval_at(-h);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            const double fd = (plus[i] - minus[i]) / (2.0 * h);
            num += (fd - analytic[i]) * (fd - analytic[i]);
            den += analytic[i] * analytic[i];
        }
        const double err = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
        best = std::min(best, err);
    }
    return best;
}

} // namespace oracles
