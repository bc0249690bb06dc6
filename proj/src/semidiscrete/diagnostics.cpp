#include "gjet/semidiscrete/diagnostics.hpp"

#include "gjet/core/errors.hpp"
#include "gjet/core/geometry.hpp"
#include "gjet/genfun/maps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gjet {

double lipschitz_diagnostic(const SolutionState& state, const SemiDiscreteProblem& prob)
{
    const auto& grid = prob.grid;
    const auto& u = state.decomposition.values;
    const int n = grid.dim();
    double worst = 0.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        double g2 = 0.0;
        bool inside = true;
        for (int k = 0; k < n && inside; ++k) {
            const long nb = grid.neighbor(c, k, 1);
            if (nb < 0) {
                inside = false;
                break;
            }
            const double d = (u[static_cast<std::size_t>(nb)] - u[c]) / grid.spacing(k);
            g2 += d * d;
        }
        if (inside)
            worst = std::max(worst, std::sqrt(g2));
    }
    return worst;
}

std::vector<InterfacePoint> find_interfaces(const PiecewiseGSolution& sol, const SourceGrid& grid,
                                            const CellDecomposition& dec)
{
    const auto& gf = sol.gf();
    std::vector<InterfacePoint> out;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        for (int k = 0; k < grid.dim(); ++k) {
            const long nb = grid.neighbor(c, k, 1);
            if (nb < 0)
                continue;
            const int a = dec.assignment[c];
            const int b = dec.assignment[static_cast<std::size_t>(nb)];
            if (a == b)
                continue;
            const auto& pa = sol.pieces()[static_cast<std::size_t>(a)];
            const auto& pb = sol.pieces()[static_cast<std::size_t>(b)];
            const Vec x0 = grid.center(c);
            const Vec x1 = grid.center(static_cast<std::size_t>(nb));
            auto diff = [&](double s) {
                const Vec x = x0 + s * (x1 - x0);
                return gf.value(view(x), view(pa.y), pa.z) - gf.value(view(x), view(pb.y), pb.z);
            };
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
                const double mid = 0.5 * (lo + hi);
                (diff(mid) >= 0.0 ? lo : hi) = mid;
            }
            const Vec x = x0 + (0.5 * (lo + hi)) * (x1 - x0);
            const auto active = subdifferential(sol, x);
            if (active.size() == 2)
                out.push_back({x, active[0].index, active[1].index});
        }
    }
    return out;
}

ConditionRecord range_diagnostic(const SolutionState& state, const SemiDiscreteProblem& prob,
                                 const std::vector<Vec>& hull_points, const RangeOptions& opts)
{
    ConditionRecord rec;
    rec.name = "range";
    const auto sol = to_piecewise(prob, state.z);
    const auto& gf = *prob.gf;
    double scale = 1.0;
    for (const auto& p : hull_points)
        scale = std::max(scale, p.lpNorm<Eigen::Infinity>());

    double worst_piece = 0.0;
    for (std::size_t i = 0; i < sol.size(); ++i) {
        if (state.decomposition.masses[i] <= 0.0)
            continue;
        const double d = geometry::distance_outside_hull(hull_points, sol.pieces()[i].y);
        ++rec.samples_used;
        if (d > worst_piece) {
            worst_piece = d;
            rec.witness = Witness{prob.anchor.x0, sol.pieces()[i].y, sol.pieces()[i].z, {}, {}};
        }
    }

    double worst_p = 0.0;
    double worst_euclid = 0.0;
    if (!opts.t_values.empty()) {
        const auto interfaces = find_interfaces(sol, prob.grid, state.decomposition);
        for (const auto& ip : interfaces) {
            const double u = eval_piecewise(sol, ip.x).u;
            auto p_of = [&](const Vec& y) {
                const double z = dual_value(gf, view(ip.x), view(y), u);
                return Vec(gf.derivatives(ip.x, y, z).grad_x);
            };
            std::vector<Vec> p_hull;
            double p_scale = 1.0;
            try {
                for (const auto& y : hull_points) {
                    p_hull.push_back(p_of(y));
                    p_scale = std::max(p_scale, p_hull.back().lpNorm<Eigen::Infinity>());
                }
            } catch (const Error&) {
                rec.samples_skipped += static_cast<int>(opts.t_values.size());
                continue;
            }
            for (double t : opts.t_values) {
                GAffinePiece s;
                double d_p;
                try {
                    s = interpolated_support(sol, ip.x, t);
                    d_p = geometry::distance_outside_hull(p_hull, p_of(s.y)) / p_scale;
                } catch (const Error&) {
                    ++rec.samples_skipped;
                    continue;
                }
                ++rec.samples_used;
                worst_euclid =
                    std::max(worst_euclid, geometry::distance_outside_hull(hull_points, s.y));
                if (d_p > worst_p) {
                    worst_p = d_p;
                    if (worst_piece <= opts.hull_tol * scale)
                        rec.witness = Witness{ip.x, s.y, s.z, {}, {}};
                }
            }
        }
    }

    rec.extremal_value = std::max(worst_piece / scale, worst_p);
    std::ostringstream note;
    note.precision(6);
    if (worst_piece > opts.hull_tol * scale) {
        rec.status = Status::Fail;
        note << "an active target lies outside the hull; ";
    } else if (worst_p > opts.hull_tol) {
        rec.status = Status::Fail;
        note << "an interpolated support leaves the hull in gradient coordinates; ";
    } else {
        rec.status = Status::Pass;
    }
    note << "largest Euclidean excursion of interpolated supports " << worst_euclid;
    rec.note = note.str();
    return rec;
}

}  // namespace gjet
