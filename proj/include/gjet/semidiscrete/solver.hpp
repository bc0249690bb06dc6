#pragma once

#include "gjet/gconvex/piecewise.hpp"
#include "gjet/semidiscrete/problem.hpp"

#include <vector>

namespace gjet {

struct SolutionState
{
    std::vector<double> z;
    CellDecomposition decomposition;
    double residual = 0.0;  // max_i |mass_i - g_i| / total
    double anchor_value = 0.0;
    int sweeps = 0;
    /// Residual after each sweep.
    std::vector<double> residual_history;
    /// Pieces resting on their lower bracket end H(x0, y_i, u0).
    std::vector<char> clamped;
};

/// Normalized coordinate updates from below. Each update raises z_i to the
/// least value at which piece i carries at most g_i + slack, holding the
/// others fixed; z_i never drops below H(x0, y_i, u0), so u(x0) <= u0.
/// Throws NoConvergence (message carries the best residual) or
/// DomainViolation when a bracket collapses.
SolutionState solve(const SemiDiscreteProblem& prob);

/// The solved function as a piecewise G-affine object.
PiecewiseGSolution to_piecewise(const SemiDiscreteProblem& prob, const std::vector<double>& z);

}  // namespace gjet
