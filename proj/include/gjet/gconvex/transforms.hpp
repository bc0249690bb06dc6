#pragma once

#include "gjet/core/grid.hpp"
#include "gjet/gconvex/piecewise.hpp"

#include <vector>

namespace gjet {

/// v_j = max over cell centres x of H(x, y_j, u(x)).
std::vector<double> g_transform(const PiecewiseGSolution& sol, const SourceGrid& grid,
                                const std::vector<Vec>& targets);

/// v*(x) = max_j G(x, y_j, v_j) at every cell centre.
std::vector<double> dual_transform(const GeneratingFunction& gf, const std::vector<Vec>& targets,
                                   const std::vector<double>& v, const SourceGrid& grid);

/// max over cells of |dual_transform(g_transform(u)) - u|.
double involution_error(const PiecewiseGSolution& sol, const SourceGrid& grid);

}  // namespace gjet
