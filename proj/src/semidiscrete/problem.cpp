#include "gjet/semidiscrete/problem.hpp"

#include "gjet/genfun/maps.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace gjet {

namespace {

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

// Structural problems that make every later check meaningless.
std::vector<Diagnostic> shape_diagnostics(const SemiDiscreteProblem& prob)
{
    std::vector<Diagnostic> out;
    if (!prob.gf) {
        out.push_back({ErrorKind::InvalidArgument, "missing generating function"});
        return out;
    }
    const int n = prob.gf->dim();
    if (prob.grid.dim() != n)
        out.push_back({ErrorKind::InvalidArgument, "grid dimension does not match"});
    if (prob.targets.empty())
        out.push_back({ErrorKind::InvalidArgument, "no targets"});
    if (prob.targets.size() != prob.masses.size())
        out.push_back({ErrorKind::InvalidArgument, "targets and masses differ in length"});
    for (const auto& y : prob.targets)
        if (y.size() != n || !y.allFinite())
            out.push_back({ErrorKind::InvalidArgument, "malformed target point"});
    for (double g : prob.masses)
        if (!(g > 0.0) || !std::isfinite(g))
            out.push_back({ErrorKind::InvalidArgument, "target masses must be positive"});
    if (prob.anchor.x0.size() != n || !prob.anchor.x0.allFinite() ||
        !std::isfinite(prob.anchor.u0))
        out.push_back({ErrorKind::InvalidArgument, "malformed anchor"});
    if (!(prob.tol.mass_tol_rel > 0.0) || prob.tol.max_sweeps < 1)
        out.push_back({ErrorKind::InvalidArgument, "invalid solver tolerances"});
    return out;
}

}  // namespace

std::vector<Bracket> feasibility_brackets(const SemiDiscreteProblem& prob)
{
    const auto& gf = *prob.gf;
    const Vec& x0 = prob.anchor.x0;
    const double u0 = prob.anchor.u0;
    std::vector<Bracket> out;
    Vec x(prob.grid.dim());
    for (std::size_t i = 0; i < prob.targets.size(); ++i) {
        const Vec& y = prob.targets[i];
        if (!gf.admissible_pair(view(x0), view(y)) || !gf.u_interval(view(x0), view(y)).contains(u0))
            throw Error(ErrorKind::AnchorInadmissible,
                        "u0 is outside the range of G(x0, y_" + std::to_string(i) + ", .)");
        Bracket b;
        try {
            b.lo = dual_value(gf, view(x0), view(y), u0);
        } catch (const Error& e) {
            throw Error(ErrorKind::InfeasibleBracket,
                        "no z with G(x0, y_" + std::to_string(i) + ", z) = u0: " + e.detail());
        }
        b.hi = kInf;
        double floor = -kInf;
        for (std::size_t c = 0; c < prob.grid.cell_count(); ++c) {
            prob.grid.center(c, x.data());
            if (!gf.admissible_pair(view(x), view(y)))
                throw Error(ErrorKind::InfeasibleBracket,
                            "target " + std::to_string(i) + " is not admissible on the grid");
            const Interval iv = gf.z_interval(view(x), view(y));
            b.hi = std::min(b.hi, iv.hi);
            floor = std::max(floor, iv.lo);
        }
        if (!(b.lo > floor) || !(b.lo < b.hi))
            throw Error(ErrorKind::InfeasibleBracket,
                        "empty bracket for target " + std::to_string(i) + ": [" + fmt(b.lo) +
                            ", " + fmt(b.hi) + ")");
        out.push_back(b);
    }
    return out;
}

std::vector<Diagnostic> validate_problem(const SemiDiscreteProblem& prob)
{
    auto out = shape_diagnostics(prob);
    if (!out.empty())
        return out;

    const double total = prob.grid.total_mass();
    const double sum = std::accumulate(prob.masses.begin(), prob.masses.end(), 0.0);
    if (std::abs(sum - total) > prob.tol.mass_tol_rel * total)
        out.push_back({ErrorKind::MassImbalance,
                       "target masses sum to " + fmt(sum) + ", source mass is " + fmt(total)});

    const auto& box = prob.grid.box();
    const Vec& x0 = prob.anchor.x0;
    bool anchor_ok = true;
    for (int k = 0; k < x0.size(); ++k)
        if (!(x0[k] > box.lo[k] && x0[k] < box.hi[k]))
            anchor_ok = false;
    if (!anchor_ok) {
        out.push_back({ErrorKind::AnchorInadmissible, "x0 is not interior to the source box"});
    } else if (const auto g5 = prob.gf->g5()) {
        const double k1 = g5->k0 * box.distance_to_boundary(x0);
        if (std::isfinite(g5->m0) && !(prob.anchor.u0 > g5->m0 + k1))
            out.push_back({ErrorKind::AnchorInadmissible,
                           "u0 = " + fmt(prob.anchor.u0) + " does not exceed m0 + K0 dist(x0, boundary) = " +
                               fmt(g5->m0 + k1)});
    }

    if (anchor_ok) {
        try {
            feasibility_brackets(prob);
        } catch (const Error& e) {
            out.push_back({e.kind(), e.detail()});
        }
    }
    return out;
}

void require_valid(const SemiDiscreteProblem& prob)
{
    const auto diags = validate_problem(prob);
    if (!diags.empty())
        throw Error(diags.front().kind, diags.front().message);
}

}  // namespace gjet
