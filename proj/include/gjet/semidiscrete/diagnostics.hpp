#pragma once

#include "gjet/conditions/report.hpp"
#include "gjet/semidiscrete/solver.hpp"

#include <vector>

namespace gjet {

/// Largest forward-difference gradient norm of u over cells whose forward
/// neighbours all exist.
double lipschitz_diagnostic(const SolutionState& state, const SemiDiscreteProblem& prob);

/// A point where exactly two pieces are active, found between two adjacent
/// cell centres assigned to different pieces.
struct InterfacePoint
{
    Vec x;
    int first = 0;
    int second = 0;
};

/// Interfaces between face-adjacent cells; points where a third piece is
/// also active are dropped.
std::vector<InterfacePoint> find_interfaces(const PiecewiseGSolution& sol, const SourceGrid& grid,
                                            const CellDecomposition& dec);

struct RangeOptions
{
    /// Interpolation parameters for supports at interfaces (empty: none).
    std::vector<double> t_values{0.5};
    /// Relative tolerance of the hull membership tests.
    double hull_tol = 1e-8;
};

/// Every active target lies in the convex hull of `hull_points`. An
/// interpolated support y0 at an interface point x is tested in the
/// coordinates P(y) = G_x(x, y, H(x, y, u(x))): P(y0) must lie in the hull
/// of P(hull_points). The Euclidean hull of a finite target set need not be
/// G*-convex, so y0 itself may leave it; the largest such excursion is
/// reported in the note.
ConditionRecord range_diagnostic(const SolutionState& state, const SemiDiscreteProblem& prob,
                                 const std::vector<Vec>& hull_points,
                                 const RangeOptions& opts = {});

}  // namespace gjet
