#pragma once

#include "gjet/core/errors.hpp"
#include "gjet/core/grid.hpp"
#include "gjet/gconvex/piecewise.hpp"
#include "gjet/genfun/generating_function.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace gjet {

struct SolverTolerances
{
    double mass_tol_rel = 1e-4;
    /// Negative selects 1e-8 (1 + |u0|).
    double anchor_tol = -1.0;
    int max_sweeps = 500;
    /// Sweeps stop once no z moves by more than z_tol (1 + |z|).
    double z_tol = 1e-10;

    double anchor_tolerance(double u0) const
    {
        return anchor_tol >= 0.0 ? anchor_tol : 1e-8 * (1.0 + std::abs(u0));
    }
};

struct SemiDiscreteProblem
{
    std::shared_ptr<const GeneratingFunction> gf;
    SourceGrid grid;
    std::vector<Vec> targets;
    std::vector<double> masses;
    Anchor anchor;
    SolverTolerances tol;
};

struct Diagnostic
{
    ErrorKind kind;
    std::string message;
};

/// Feasible range [lo, hi) of each z_i: lo = H(x0, y_i, u0), hi = inf over
/// cell centres of the upper end of I(x, y_i).
struct Bracket
{
    double lo = 0.0;
    double hi = 0.0;
};

/// Mass balance, anchor admissibility and bracket feasibility.
/// An empty list means the problem is valid.
std::vector<Diagnostic> validate_problem(const SemiDiscreteProblem& prob);

/// Throws the first diagnostic of validate_problem, if any.
void require_valid(const SemiDiscreteProblem& prob);

/// Brackets for all targets; throws InfeasibleBracket or AnchorInadmissible.
std::vector<Bracket> feasibility_brackets(const SemiDiscreteProblem& prob);

}  // namespace gjet
