#include "gjet/gconvex/transforms.hpp"

#include "gjet/core/errors.hpp"
#include "gjet/core/parallel.hpp"
#include "gjet/genfun/maps.hpp"

#include <algorithm>
#include <cmath>

namespace gjet {

std::vector<double> g_transform(const PiecewiseGSolution& sol, const SourceGrid& grid,
                                const std::vector<Vec>& targets)
{
    const auto dec = cell_masses(sol, grid);
    const auto& gf = sol.gf();
    std::vector<double> v(targets.size(), -kInf);
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const Vec& y = targets[j];
        // Per-chunk maxima, combined in chunk order.
        const std::size_t cells = grid.cell_count();
        std::vector<double> best(cells, -kInf);
        parallel_for(cells, [&](std::size_t begin, std::size_t end) {
            Vec x(grid.dim());
            for (std::size_t c = begin; c < end; ++c) {
                grid.center(c, x.data());
                best[c] = dual_value(gf, view(x), view(y), dec.values[c]);
            }
        });
        v[j] = *std::max_element(best.begin(), best.end());
    }
    return v;
}

std::vector<double> dual_transform(const GeneratingFunction& gf, const std::vector<Vec>& targets,
                                   const std::vector<double>& v, const SourceGrid& grid)
{
    if (targets.size() != v.size() || targets.empty())
        throw Error(ErrorKind::InvalidArgument, "targets and values must match and be nonempty");
    const std::size_t cells = grid.cell_count();
    std::vector<double> out(cells, -kInf);
    std::vector<char> bad(cells, 0);
    parallel_for(cells, [&](std::size_t begin, std::size_t end) {
        Vec x(grid.dim());
        for (std::size_t c = begin; c < end; ++c) {
            grid.center(c, x.data());
            for (std::size_t j = 0; j < targets.size(); ++j) {
                if (!gf.admissible_pair(view(x), view(targets[j])) ||
                    !gf.z_interval(view(x), view(targets[j])).contains(v[j])) {
                    bad[c] = 1;
                    continue;
                }
                out[c] = std::max(out[c], gf.value(view(x), view(targets[j]), v[j]));
            }
        }
    });
    if (std::find(bad.begin(), bad.end(), 1) != bad.end())
        throw Error(ErrorKind::DomainViolation, "dual value outside I(x, y) on the grid");
    return out;
}

double involution_error(const PiecewiseGSolution& sol, const SourceGrid& grid)
{
    std::vector<Vec> targets;
    for (const auto& p : sol.pieces())
        targets.push_back(p.y);
    const auto v = g_transform(sol, grid, targets);
    const auto back = dual_transform(sol.gf(), targets, v, grid);
    const auto dec = cell_masses(sol, grid);
    double err = 0.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c)
        err = std::max(err, std::abs(back[c] - dec.values[c]));
    return err;
}

}  // namespace gjet
