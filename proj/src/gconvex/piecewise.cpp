#include "gjet/gconvex/piecewise.hpp"

#include "gjet/conditions/convexity.hpp"
#include "gjet/core/errors.hpp"
#include "gjet/core/parallel.hpp"
#include "gjet/genfun/maps.hpp"

#include <algorithm>
#include <string>

namespace gjet {

PiecewiseGSolution::PiecewiseGSolution(std::shared_ptr<const GeneratingFunction> gf,
                                       std::vector<GAffinePiece> pieces, Anchor anchor)
    : gf_(std::move(gf)), pieces_(std::move(pieces)), anchor_(std::move(anchor))
{
    if (!gf_)
        throw Error(ErrorKind::InvalidArgument, "missing generating function");
    for (const auto& p : pieces_)
        if (p.y.size() != gf_->dim() || !p.y.allFinite() || !std::isfinite(p.z))
            throw Error(ErrorKind::InvalidArgument, "malformed G-affine piece");
}

void check_admissible_on_grid(const PiecewiseGSolution& sol, const SourceGrid& grid)
{
    const auto& gf = sol.gf();
    Vec x(grid.dim());
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        grid.center(c, x.data());
        for (std::size_t i = 0; i < sol.size(); ++i) {
            const auto& pc = sol.pieces()[i];
            if (!gf.admissible_pair(view(x), view(pc.y)) ||
                !gf.z_interval(view(x), view(pc.y)).contains(pc.z))
                throw Error(ErrorKind::DomainViolation,
                            "piece " + std::to_string(i) + " is not admissible on the grid");
        }
    }
}

PiecewiseValue eval_piecewise(const PiecewiseGSolution& sol, const Vec& x)
{
    if (sol.size() == 0)
        throw Error(ErrorKind::InvalidArgument, "no pieces");
    const auto& gf = sol.gf();
    PiecewiseValue out{-kInf, 0};
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const auto& pc = sol.pieces()[i];
        if (!gf.admissible_pair(view(x), view(pc.y)) ||
            !gf.z_interval(view(x), view(pc.y)).contains(pc.z))
            throw Error(ErrorKind::DomainViolation,
                        "piece " + std::to_string(i) + " is not admissible at x");
        const double g = gf.value(view(x), view(pc.y), pc.z);
        if (g > out.u) {
            out.u = g;
            out.index = static_cast<int>(i);
        }
    }
    return out;
}

CellDecomposition cell_masses(const PiecewiseGSolution& sol, const SourceGrid& grid)
{
    if (sol.size() == 0)
        throw Error(ErrorKind::InvalidArgument, "no pieces");
    const auto& gf = sol.gf();
    const int n = grid.dim();
    const std::size_t cells = grid.cell_count();
    CellDecomposition dec;
    dec.assignment.assign(cells, 0);
    dec.values.assign(cells, 0.0);
    dec.active_tol = 1e-9;
    parallel_for(cells, [&](std::size_t begin, std::size_t end) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (std::size_t c = begin; c < end; ++c) {
            grid.center(c, x.data());
            double best = -kInf;
            int arg = 0;
            for (std::size_t i = 0; i < sol.size(); ++i) {
                const auto& pc = sol.pieces()[i];
                const double g = gf.value(x, view(pc.y), pc.z);
                if (g > best) {
                    best = g;
                    arg = static_cast<int>(i);
                }
            }
            dec.assignment[c] = arg;
            dec.values[c] = best;
        }
    });
    dec.masses.assign(sol.size(), 0.0);
    for (std::size_t c = 0; c < cells; ++c)
        dec.masses[static_cast<std::size_t>(dec.assignment[c])] += grid.cell_mass(c);
    return dec;
}

std::vector<SubgradientPair> subdifferential(const PiecewiseGSolution& sol, const Vec& x)
{
    const auto top = eval_piecewise(sol, x);
    const double tol = active_tolerance(top.u);
    std::vector<SubgradientPair> out;
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const auto& pc = sol.pieces()[i];
        const auto b = sol.gf().derivatives(x, pc.y, pc.z);
        if (b.value >= top.u - tol)
            out.push_back({b.grad_x, pc.y, static_cast<int>(i)});
    }
    return out;
}

GAffinePiece interpolated_support(const PiecewiseGSolution& sol, const Vec& x0, double t)
{
    const auto& gf = sol.gf();
    const auto active = subdifferential(sol, x0);
    if (active.size() != 2)
        throw Error(ErrorKind::InvalidArgument,
                    "interpolation needs exactly two active pieces, found " +
                        std::to_string(active.size()));
    if (t == 0.0 || t == 1.0)
        return sol.pieces()[static_cast<std::size_t>(active[t == 0.0 ? 0 : 1].index)];
    const double u0 = eval_piecewise(sol, x0).u;
    const Vec p0 = (1.0 - t) * active[0].p + t * active[1].p;
    const auto fw = forward_YZ(gf, x0, u0, p0);
    return {fw.y, dual_H(gf, x0, fw.y, u0).z_root};
}

SupportResult support_check(const PiecewiseGSolution& sol, const SourceGrid& grid, const Vec& x0,
                            double t, double support_tol, const std::vector<double>* u_values)
{
    const auto& gf = sol.gf();
    const auto piece = interpolated_support(sol, x0, t);
    SupportResult res;
    res.y0 = piece.y;
    res.z0 = piece.z;

    CellDecomposition dec;
    if (!u_values) {
        dec = cell_masses(sol, grid);
        u_values = &dec.values;
    }
    if (support_tol < 0.0) {
        double umax = 0.0;
        for (double v : *u_values)
            umax = std::max(umax, std::abs(v));
        support_tol = 1e-9 * (1.0 + umax);
    }

    res.max_excess = -kInf;
    Vec x(grid.dim());
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        grid.center(c, x.data());
        if (!gf.admissible_pair(view(x), view(res.y0)))
            continue;
        const double g = gf.value(view(x), view(res.y0), res.z0);
        res.max_excess = std::max(res.max_excess, g - (*u_values)[c]);
    }
    res.ok = res.max_excess <= support_tol;
    return res;
}

std::vector<char> section_set(const PiecewiseGSolution& sol, const SourceGrid& grid,
                              std::size_t piece, double sigma)
{
    if (piece >= sol.size())
        throw Error(ErrorKind::InvalidArgument, "piece index out of range");
    if (!(sigma >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "sigma must be nonnegative");
    const auto dec = cell_masses(sol, grid);
    const auto& pc = sol.pieces()[piece];
    std::vector<char> mask(grid.cell_count(), 0);
    Vec x(grid.dim());
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        grid.center(c, x.data());
        const double u = dec.values[c];
        const double g = sol.gf().value(view(x), view(pc.y), pc.z);
        mask[c] = sigma > 0.0 ? (u < g + sigma) : (u - g <= active_tolerance(u));
    }
    return mask;
}

ConditionRecord section_convexity(const PiecewiseGSolution& sol, const SourceGrid& grid,
                                  std::size_t piece, double sigma, double band_cells)
{
    const auto mask = section_set(sol, grid, piece, sigma);
    const auto& pc = sol.pieces()[piece];
    RasterRegion region{grid, mask};
    return mapped_region_convexity(
        region, [&](const Vec& x) { return map_Q(sol.gf(), x, pc.y, pc.z); }, band_cells,
        "section");
}

}  // namespace gjet
