#include "gjet/semidiscrete/solver.hpp"

#include "gjet/core/parallel.hpp"
#include "gjet/genfun/maps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gjet {

PiecewiseGSolution to_piecewise(const SemiDiscreteProblem& prob, const std::vector<double>& z)
{
    std::vector<GAffinePiece> pieces;
    for (std::size_t i = 0; i < prob.targets.size(); ++i)
        pieces.push_back({prob.targets[i], z[i]});
    return PiecewiseGSolution(prob.gf, std::move(pieces), prob.anchor);
}

namespace {

// Value arrays V[j][c] = G(x_c, y_j, z_j) for every piece, kept in sync
// with z by the solver.
class PieceValues
{
  public:
    PieceValues(const SemiDiscreteProblem& prob, const std::vector<double>& z)
        : prob_(prob), centers_(prob.grid.centers()), n_(prob.grid.dim()),
          cells_(prob.grid.cell_count()), v_(z.size(), std::vector<double>(cells_))
    {
        for (std::size_t j = 0; j < z.size(); ++j)
            refresh(j, z[j]);
    }

    std::size_t cells() const { return cells_; }
    std::span<const double> x(std::size_t c) const
    {
        return {centers_.data() + c * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
    }
    const std::vector<double>& values(std::size_t j) const { return v_[j]; }

    void refresh(std::size_t j, double z)
    {
        const auto& gf = *prob_.gf;
        const Vec& y = prob_.targets[j];
        auto& vj = v_[j];
        parallel_for(cells_, [&](std::size_t b, std::size_t e) {
            for (std::size_t c = b; c < e; ++c)
                vj[c] = gf.value(x(c), view(y), z);
        });
    }

    /// Highest value among pieces other than i, and its (lowest) index.
    void others(std::size_t i, std::vector<double>& val, std::vector<int>& idx) const
    {
        val.assign(cells_, -kInf);
        idx.assign(cells_, -1);
        for (std::size_t j = 0; j < v_.size(); ++j) {
            if (j == i)
                continue;
            const auto& vj = v_[j];
            for (std::size_t c = 0; c < cells_; ++c)
                if (vj[c] > val[c]) {
                    val[c] = vj[c];
                    idx[c] = static_cast<int>(j);
                }
        }
    }

    std::vector<double> masses() const
    {
        std::vector<double> m(v_.size(), 0.0);
        for (std::size_t c = 0; c < cells_; ++c) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < v_.size(); ++j)
                if (v_[j][c] > v_[best][c])
                    best = j;
            m[best] += prob_.grid.cell_mass(c);
        }
        return m;
    }

  private:
    const SemiDiscreteProblem& prob_;
    std::vector<double> centers_;
    int n_;
    std::size_t cells_;
    std::vector<std::vector<double>> v_;
};

double relative_residual(const std::vector<double>& m, const std::vector<double>& g, double total)
{
    double r = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        r = std::max(r, std::abs(m[i] - g[i]));
    return r / total;
}

// z at which piece i stops winning cell x: G(x, y_i, z) = level.
double switch_threshold(const GeneratingFunction& gf, std::span<const double> x, const Vec& y,
                        double level)
{
    const Interval j = gf.u_interval(x, view(y));
    if (!(level > j.lo))
        return kInf;  // piece i wins for every admissible z
    if (!(level < j.hi))
        return -kInf;
    return dual_value(gf, x, view(y), level);
}

struct Candidate
{
    double h;
    std::size_t cell;
};

}  // namespace

SolutionState solve(const SemiDiscreteProblem& prob)
{
    require_valid(prob);
    const auto brackets = feasibility_brackets(prob);
    const auto& gf = *prob.gf;
    const std::size_t count = prob.targets.size();
    const double total = prob.grid.total_mass();
    const double slack =
        0.5 * prob.tol.mass_tol_rel * total / static_cast<double>(std::max<std::size_t>(1, count - 1));
    const double anchor_tol = prob.tol.anchor_tolerance(prob.anchor.u0);
    // Balance is validated up to mass_tol_rel; updates aim at masses scaled
    // to the exact source total so that every target bound is attainable.
    const double declared = std::accumulate(prob.masses.begin(), prob.masses.end(), 0.0);
    std::vector<double> goal(count);
    for (std::size_t i = 0; i < count; ++i)
        goal[i] = prob.masses[i] * (total / declared);

    std::vector<double> z(count);
    for (std::size_t i = 0; i < count; ++i)
        z[i] = brackets[i].lo;
    PieceValues values(prob, z);

    SolutionState state;
    std::vector<double> other_val;
    std::vector<int> other_idx;
    std::vector<double> thresholds(values.cells());
    std::vector<Candidate> cand;
    int shifts = 0;

    for (int sweep = 1;; ++sweep) {
        if (sweep > prob.tol.max_sweeps) {
            std::ostringstream msg;
            msg << "no convergence in " << prob.tol.max_sweeps << " sweeps; best residual "
                << (state.residual_history.empty()
                        ? kInf
                        : *std::min_element(state.residual_history.begin(),
                                            state.residual_history.end()));
            throw Error(ErrorKind::NoConvergence, msg.str());
        }
        bool moved = false;
        for (std::size_t i = 0; i < count; ++i) {
            values.others(i, other_val, other_idx);
            const auto& vi = values.values(i);
            cand.clear();
            double mass = 0.0;
            for (std::size_t c = 0; c < values.cells(); ++c) {
                const bool wins = vi[c] > other_val[c] ||
                                  (vi[c] == other_val[c] && static_cast<int>(i) < other_idx[c]);
                if (wins) {
                    mass += prob.grid.cell_mass(c);
                    cand.push_back({0.0, c});
                }
            }
            const double target = goal[i] + slack;
            if (mass <= target)
                continue;

            const Vec& y = prob.targets[i];
            parallel_for(cand.size(), [&](std::size_t b, std::size_t e) {
                for (std::size_t k = b; k < e; ++k) {
                    const std::size_t c = cand[k].cell;
                    cand[k].h = other_idx[c] < 0 ? kInf
                                                 : switch_threshold(gf, values.x(c), y, other_val[c]);
                }
            });
            std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
                return a.h > b.h || (a.h == b.h && a.cell < b.cell);
            });
            double cum = 0.0;
            std::size_t m = 0;
            while (m < cand.size() && cum + prob.grid.cell_mass(cand[m].cell) <= target) {
                cum += prob.grid.cell_mass(cand[m].cell);
                ++m;
            }
            // Cells from m on must be released: z just above their thresholds.
            const double h = cand[m].h;
            if (!std::isfinite(h) || h >= brackets[i].hi)
                throw Error(ErrorKind::DomainViolation,
                            "bracket collapse for target " + std::to_string(i) +
                                ": required z leaves I(x, y)");
            double z_new = h + 1e-12 * (1.0 + std::abs(h));
            z_new = std::max(z_new, z[i]);
            if (z_new >= brackets[i].hi)
                throw Error(ErrorKind::DomainViolation,
                            "bracket collapse for target " + std::to_string(i));
            if (z_new - z[i] > prob.tol.z_tol * (1.0 + std::abs(z[i])))
                moved = true;
            z[i] = z_new;
            values.refresh(i, z[i]);
        }

        const auto masses = values.masses();
        state.residual = relative_residual(masses, prob.masses, total);
        state.residual_history.push_back(state.residual);
        state.sweeps = sweep;
        if (moved)
            continue;

        // Stationary. The anchor piece normally sits on its clamp; if none
        // does, lift every piece at x0 by the anchor gap and keep sweeping.
        const auto sol = to_piecewise(prob, z);
        const double ux0 = eval_piecewise(sol, prob.anchor.x0).u;
        if (prob.anchor.u0 - ux0 > anchor_tol && shifts < 50) {
            ++shifts;
            const double gap = prob.anchor.u0 - ux0;
            for (std::size_t i = 0; i < count; ++i) {
                const double g = gf.value(view(prob.anchor.x0), view(prob.targets[i]), z[i]);
                z[i] = std::max(brackets[i].lo,
                                dual_value(gf, view(prob.anchor.x0), view(prob.targets[i]), g + gap));
                values.refresh(i, z[i]);
            }
            continue;
        }
        break;
    }

    const auto sol = to_piecewise(prob, z);
    state.z = z;
    state.decomposition = cell_masses(sol, prob.grid);
    state.residual = relative_residual(state.decomposition.masses, prob.masses, total);
    state.anchor_value = eval_piecewise(sol, prob.anchor.x0).u;
    state.clamped.assign(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        state.clamped[i] = z[i] <= brackets[i].lo ? 1 : 0;
        if (state.decomposition.masses[i] == 0.0)
            throw Error(ErrorKind::InfeasibleBracket,
                        "target " + std::to_string(i) + " receives no mass at this anchor");
    }
    if (state.residual > prob.tol.mass_tol_rel) {
        std::ostringstream msg;
        msg << "stationary with residual " << state.residual << " above mass_tol_rel";
        throw Error(ErrorKind::NoConvergence, msg.str());
    }
    if (std::abs(state.anchor_value - prob.anchor.u0) > anchor_tol)
        throw Error(ErrorKind::NoConvergence, "anchor value not reached");
    return state;
}

}  // namespace gjet
