#pragma once

#include "gjet/conditions/report.hpp"
#include "gjet/core/grid.hpp"
#include "gjet/genfun/generating_function.hpp"

#include <cmath>
#include <memory>
#include <vector>

namespace gjet {

/// The G-affine function x -> G(x, y, z).
struct GAffinePiece
{
    Vec y;
    double z = 0.0;
};

/// Normalization point: u(x0) = u0.
struct Anchor
{
    Vec x0;
    double u0 = 0.0;
};

/// u(x) = max_i G(x, y_i, z_i). Pieces are indexed from 0.
class PiecewiseGSolution
{
  public:
    PiecewiseGSolution(std::shared_ptr<const GeneratingFunction> gf,
                       std::vector<GAffinePiece> pieces, Anchor anchor);

    const GeneratingFunction& gf() const noexcept { return *gf_; }
    const std::shared_ptr<const GeneratingFunction>& gf_ptr() const noexcept { return gf_; }
    const std::vector<GAffinePiece>& pieces() const noexcept { return pieces_; }
    std::size_t size() const noexcept { return pieces_.size(); }
    const Anchor& anchor() const noexcept { return anchor_; }

    void set_z(std::size_t i, double z) { pieces_[i].z = z; }

  private:
    std::shared_ptr<const GeneratingFunction> gf_;
    std::vector<GAffinePiece> pieces_;
    Anchor anchor_;
};

/// Default active-set tolerance at value u.
inline double active_tolerance(double u)
{
    return 1e-9 * (1.0 + std::abs(u));
}

/// Throws DomainViolation unless every piece is admissible at every cell centre.
void check_admissible_on_grid(const PiecewiseGSolution& sol, const SourceGrid& grid);

struct PiecewiseValue
{
    double u = 0.0;
    int index = 0;
};

/// Maximum over the pieces; ties go to the lowest index.
PiecewiseValue eval_piecewise(const PiecewiseGSolution& sol, const Vec& x);

/// Cell-centre assignment of the source grid to pieces.
struct CellDecomposition
{
    std::vector<int> assignment;  // piece per cell
    std::vector<double> values;   // u at the cell centre
    std::vector<double> masses;   // per piece
    double active_tol = 0.0;      // relative factor; see active_tolerance()
};

CellDecomposition cell_masses(const PiecewiseGSolution& sol, const SourceGrid& grid);

struct SubgradientPair
{
    Vec p;
    Vec y;
    int index = 0;
};

/// (G_x, y_i) of every piece active at x within active_tolerance(u(x)).
std::vector<SubgradientPair> subdifferential(const PiecewiseGSolution& sol, const Vec& x);

struct SupportResult
{
    Vec y0;
    double z0 = 0.0;
    bool ok = false;
    /// max over the grid of G(x, y0, z0) - u(x).
    double max_excess = 0.0;
};

/// G-affine function through (x0, u(x0)) with gradient
/// p0 = (1 - t) p1 + t p2, where p1, p2 are the gradients of the two pieces
/// active at x0. Throws InvalidArgument unless exactly two are active.
GAffinePiece interpolated_support(const PiecewiseGSolution& sol, const Vec& x0, double t);

/// ok iff the interpolated support stays below u + support_tol at every cell
/// centre. `u_values` may pass precomputed cell values of u. A negative
/// support_tol selects 1e-9 (1 + max |u|).
SupportResult support_check(const PiecewiseGSolution& sol, const SourceGrid& grid, const Vec& x0,
                            double t, double support_tol = -1.0,
                            const std::vector<double>* u_values = nullptr);

/// Cells with u < G(., y_i, z_i) + sigma (sigma > 0), or with piece i active
/// within the active tolerance (sigma = 0).
std::vector<char> section_set(const PiecewiseGSolution& sol, const SourceGrid& grid,
                              std::size_t piece, double sigma);

/// Hull-ratio convexity of Q(., y_i, z_i) applied to the section.
ConditionRecord section_convexity(const PiecewiseGSolution& sol, const SourceGrid& grid,
                                  std::size_t piece, double sigma, double band_cells = 2.0);

}  // namespace gjet
