// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "gjet/cli/commands.hpp"
#include "gjet/cli/output.hpp"
#include "gjet/conditions/checks.hpp"
#include "gjet/core/errors.hpp"
#include "gjet/core/random.hpp"
#include "gjet/gconvex/transforms.hpp"
#include "gjet/genfun/instances.hpp"
#include "gjet/genfun/maps.hpp"
#include "gjet/madiag/residuals.hpp"
#include "gjet/semidiscrete/diagnostics.hpp"
#include "gjet/semidiscrete/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

using namespace gjet;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec v2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

Box box2(double lo, double hi)
{
    return Box{Vec::Constant(2, lo), Vec::Constant(2, hi)};
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Verdict
{
    bool pass = false;
    std::string detail;
};

SampleSpec spec_for(const std::string& kind, int pairs, std::uint64_t seed)
{
    SampleSpec s;
    s.count = pairs;
    s.seed = seed;
    if (kind == "quadratic_ot") {
        s.x_region = box2(-1.0, 1.0);
        s.y_region = box2(-1.0, 1.0);
    } else if (kind == "parallel_beam") {
        s.x_region = box2(0.0, 1.0);
        s.y_region = box2(0.0, 1.0);
    } else {
        s.x_region = box2(-0.6, 0.6);
        s.y_region = box2(-1.0, 1.0);
    }
    return s;
}

double rel_unit(double a, double b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

//---------------------------------------------------------------------------//
// Solved parallel beam cases shared by criteria 5 to 10
//---------------------------------------------------------------------------//

struct Solved
{
    std::string label;
    SemiDiscreteProblem prob;
    SolutionState state;
};

SemiDiscreteProblem pb_problem(std::vector<Vec> targets)
{
    SemiDiscreteProblem p;
    p.gf = make_generating_function("parallel_beam", 2);
    p.grid = SourceGrid(box2(0.0, 1.0), {256, 256});
    const double share = p.grid.total_mass() / static_cast<double>(targets.size());
    p.masses.assign(targets.size(), share);
    p.targets = std::move(targets);
    p.anchor = Anchor{v2(0.5, 0.5), 1.0};
    return p;
}

std::map<int, Solved>& solved()
{
    static std::map<int, Solved> cases;
    return cases;
}

std::vector<Vec> lattice16()
{
    // rectangular: a square lattice puts four-way ties on cell diagonals
    std::vector<Vec> t;
    for (double y : {0.2, 0.4, 0.6, 0.8})
        for (double x : {0.125, 0.375, 0.625, 0.875})
            t.push_back(v2(x, y));
    return t;
}

//---------------------------------------------------------------------------//
// Criteria
//---------------------------------------------------------------------------//

Verdict c1_parallel_beam_closed_forms()
{
    const auto t0 = Clock::now();
    auto gf = make_generating_function("parallel_beam", 2);
    ForwardOptions numeric;
    numeric.closed_form_guess = false;
    double worst = 0.0;
    int count = 0;
    for (const auto& s : draw_samples(*gf, spec_for("parallel_beam", 200, 11))) {
        const auto b = gf->derivatives(s.x, s.y, s.z);
        const double u = b.value;
        const Vec& p = b.grad_x;
        const double d2 = (s.x - s.y).squaredNorm();
        const double w = 1.0 - p.squaredNorm();
        const Vec y_cf = s.x + 2.0 * u * p / w;
        const double z_cf = w / (2.0 * u);
        const double h_cf = 1.0 / (u + std::sqrt(u * u + d2));
        const double zz = s.z * s.z * d2;
        const double dete_cf = s.z * s.z * (1.0 - zz) / (1.0 + zz);

        const auto r = forward_YZ(*gf, s.x, u, p, numeric);
        worst = std::max(worst, (r.y - y_cf).norm() / std::max(1.0, y_cf.norm()));
        worst = std::max(worst, rel_unit(r.z, z_cf));
        const Mat a = matrix_A(*gf, s.x, u, p, numeric);
        worst = std::max(worst, (a + z_cf * Mat::Identity(2, 2)).norm() / std::max(1.0, z_cf));
        worst = std::max(worst, rel_unit(solve_dual_z(*gf, view(s.x), view(s.y), u), h_cf));
        worst = std::max(worst, rel_unit(matrix_E(*gf, s.x, s.y, s.z).det, dete_cf));
        ++count;
    }
    const double secs = seconds_since(t0);
    return {count == 1000 && worst <= 1e-8 && secs < 10.0,
            std::to_string(count) + " points, max rel err " + sci(worst) + " (tol 1e-8), " +
                sci(secs) + " s (limit 10)"};
}

Verdict c2_A_equivalence()
{
    double worst = 0.0;
    int count = 0;
    for (const char* kind : {"quadratic_ot", "parallel_beam", "point_source"}) {
        auto gf = make_generating_function(kind, 2, -1.0);
        int here = 0;
        for (const auto& s : draw_samples(*gf, spec_for(kind, 20, 12))) {
            const auto b = gf->derivatives(s.x, s.y, s.z);
            const Mat a = matrix_A(*gf, s.x, b.value, b.grad_x);
            const Mat m = matrix_A_from_map(*gf, s.x, b.value, b.grad_x);
            worst = std::max(worst, (a - m).cwiseAbs().maxCoeff() / std::max(1.0, a.norm()));
            ++here;
        }
        if (here < 100)
            return {false, std::string(kind) + ": only " + std::to_string(here) + " points"};
        count += here;
    }
    return {worst <= 1e-5,
            std::to_string(count) + " points, max deviation " + sci(worst) + " (tol 1e-5)"};
}

Verdict c3_mtw_values()
{
    auto q = make_generating_function("quadratic_ot", 2);
    auto pb = make_generating_function("parallel_beam", 2);
    auto ps0 = make_generating_function("point_source", 2, 0.0);
    Rng rng(13);
    double q_max = 0.0, ps_max = 0.0, pb_min = kInf, pb_centre = 0.0;
    int pb_count = 0;
    for (const auto& s : draw_samples(*q, spec_for("quadratic_ot", 200, 13))) {
        const auto [xi, eta] = orthonormal_pair(rng, 2);
        q_max = std::max(q_max, std::abs(mtw_tensor(*q, Side::Primal, s.x, s.y, s.z, xi, eta)));
    }
    for (const auto& s : draw_samples(*ps0, spec_for("point_source", 200, 13))) {
        const auto [xi, eta] = orthonormal_pair(rng, 2);
        ps_max = std::max(ps_max, std::abs(mtw_tensor(*ps0, Side::Primal, s.x, s.y, s.z, xi, eta)));
    }
    for (const auto& s : draw_samples(*pb, spec_for("parallel_beam", 200, 13))) {
        const auto [xi, eta] = orthonormal_pair(rng, 2);
        pb_min = std::min(pb_min, mtw_tensor(*pb, Side::Primal, s.x, s.y, s.z, xi, eta));
        ++pb_count;
    }
    // u = 0.5, p = 0 is y = x, z = 1
    for (int k = 0; k < 20; ++k) {
        const Vec x = v2(rng.uniform(), rng.uniform());
        const auto [xi, eta] = orthonormal_pair(rng, 2);
        pb_centre = std::max(pb_centre, std::abs(mtw_tensor(*pb, Side::Primal, x, x, 1.0, xi, eta) - 2.0));
    }
    const bool ok = q_max <= 1e-7 && ps_max <= 1e-7 && pb_centre <= 1e-3 && pb_min >= 1e-3 &&
                    pb_count == 1000;
    return {ok, "quadratic max " + sci(q_max) + " (tol 1e-7), point source tau=0 max " +
                    sci(ps_max) + " (tol 1e-7), beam |T-2| at p=0 " + sci(pb_centre) +
                    " (tol 1e-3), beam min " + sci(pb_min) + " over " + std::to_string(pb_count) +
                    " (>= 1e-3)"};
}

Verdict c4_duality()
{
    std::string detail;
    bool ok = true;
    for (const char* kind : {"parallel_beam", "point_source"}) {
        auto gf = make_generating_function(kind, 2, -1.0);
        const auto rep = check_G3_family(*gf, spec_for(kind, 40, 14), false);
        const auto* d = rep.find("G3 duality");
        ok = ok && d->status == Status::Pass && d->samples_used > 0;
        detail += std::string(kind) + " " + std::string(to_string(d->status)) + " (" +
                  std::to_string(d->samples_used) + " compared); ";
    }
    auto q = make_generating_function("quadratic_ot", 2);
    Rng rng(14);
    double q_max = 0.0;
    int n = 0;
    for (const auto& s : draw_samples(*q, spec_for("quadratic_ot", 40, 14))) {
        const auto [xi, eta] = orthonormal_pair(rng, 2);
        q_max = std::max(q_max, std::abs(mtw_tensor(*q, Side::Primal, s.x, s.y, s.z, xi, eta)));
        q_max = std::max(q_max, std::abs(mtw_tensor(*q, Side::Dual, s.y, s.x, s.z, xi, eta)));
        ++n;
    }
    ok = ok && q_max <= 1e-7 && n == 200;
    return {ok, detail + "quadratic both sides max " + sci(q_max) + " (tol 1e-7)"};
}

Verdict c5_solves()
{
    const auto t0 = Clock::now();
    auto& cases = solved();
    const std::map<int, std::vector<Vec>> targets{
        {1, {v2(0.4, 0.6)}},
        {2, {v2(0.3, 0.5), v2(0.7, 0.5)}},
        {4, {v2(0.25, 0.25), v2(0.75, 0.25), v2(0.25, 0.75), v2(0.75, 0.75)}},
        {16, lattice16()},
    };
    std::string detail;
    bool ok = true;
    for (const auto& [n, t] : targets) {
        auto prob = pb_problem(t);
        auto st = solve(prob);
        ok = ok && st.residual <= 1e-3;
        detail += "N=" + std::to_string(n) + " residual " + sci(st.residual) + "; ";
        cases[n] = Solved{"N=" + std::to_string(n), prob, st};
    }
    const auto& one = cases.at(1).state;
    ok = ok && one.residual == 0.0;
    const auto& two = cases.at(2).state;
    const double dz = std::abs(two.z[0] - two.z[1]);
    ok = ok && dz <= 1e-9;
    double dev = 0.0;
    for (double m : cases.at(4).state.decomposition.masses)
        dev = std::max(dev, std::abs(m - 0.25));
    ok = ok && dev <= 2e-3;
    const double secs = seconds_since(t0);
    ok = ok && secs < 60.0;
    return {ok, detail + "N=2 |z1-z2| " + sci(dz) + " (tol 1e-9), N=4 mass dev " + sci(dev) +
                    " (tol 2e-3), " + sci(secs) + " s (limit 60)"};
}

// Pin one piece at the anchor, Gauss-Seidel bisection on the rest against
// rasterized cell masses; keep the balanced pin closest to the anchor.
std::optional<std::vector<double>> oracle_masses(const SemiDiscreteProblem& prob)
{
    const auto& gf = *prob.gf;
    const std::size_t n = prob.targets.size();
    std::vector<double> lo(n), hi(n, kInf);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = dual_value(gf, view(prob.anchor.x0), view(prob.targets[i]), prob.anchor.u0);
        for (std::size_t c = 0; c < prob.grid.cell_count(); ++c)
            hi[i] = std::min(hi[i], gf.z_interval(view(prob.grid.center(c)), view(prob.targets[i])).hi);
    }
    auto masses_for = [&](const std::vector<double>& z) {
        std::vector<GAffinePiece> pieces;
        for (std::size_t j = 0; j < n; ++j)
            pieces.push_back({prob.targets[j], z[j]});
        return cell_masses(PiecewiseGSolution(prob.gf, pieces, prob.anchor), prob.grid).masses;
    };
    const double total = prob.grid.total_mass();
    std::optional<std::vector<double>> best;
    double best_gap = kInf;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> z = lo;
        for (int sweep = 0; sweep < 100; ++sweep) {
            double moved = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == k)
                    continue;
                double a = std::max(lo[i] - 1.0, 1e-9), b = std::min(hi[i], lo[i] + 1.0) * (1.0 - 1e-12);
                for (int it = 0; it < 44; ++it) {
                    auto trial = z;
                    trial[i] = 0.5 * (a + b);
                    (masses_for(trial)[i] > prob.masses[i] ? a : b) = trial[i];
                }
                moved = std::max(moved, std::abs(b - z[i]));
                z[i] = b;
            }
            if (moved < 1e-10)
                break;
        }
        const auto m = masses_for(z);
        double res = 0.0, gap = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res = std::max(res, std::abs(m[i] - prob.masses[i]) / total);
            gap = std::max(gap, lo[i] - z[i]);
        }
        if (res <= prob.tol.mass_tol_rel && gap < best_gap) {
            best_gap = gap;
            best = m;
        }
    }
    return best;
}

Verdict c6_oracle()
{
    const auto& c = solved().at(4);
    const auto ref = oracle_masses(c.prob);
    if (!ref)
        return {false, "oracle found no balanced pin"};
    const double total = c.prob.grid.total_mass();
    double dev = 0.0;
    for (std::size_t i = 0; i < ref->size(); ++i)
        dev = std::max(dev, std::abs(c.state.decomposition.masses[i] - (*ref)[i]) / total);
    const double tol = 2.0 * c.prob.tol.mass_tol_rel;
    return {dev <= tol, "N=4 max mass gap " + sci(dev) + " (tol " + sci(tol) + ")"};
}

Verdict c7_lipschitz()
{
    bool ok = true;
    std::string detail;
    for (const auto& [n, c] : solved()) {
        const double h = c.prob.grid.spacing(0);
        const double lip = lipschitz_diagnostic(c.state, c.prob);
        double umin = kInf;
        for (double u : c.state.decomposition.values)
            umin = std::min(umin, u);
        ok = ok && lip <= 1.0 + 2.0 * h && umin > 0.0;
        detail += c.label + " |Du| " + sci(lip) + " u_min " + sci(umin) + "; ";
    }
    return {ok, detail + "bound 1+2h"};
}

Verdict c8_involution()
{
    double worst = 0.0;
    for (const auto& [n, c] : solved())
        worst = std::max(worst, involution_error(to_piecewise(c.prob, c.state.z), c.prob.grid));
    return {worst <= 1e-6, "max |v* - u| " + sci(worst) + " over N=1,2,4,16 (tol 1e-6)"};
}

Verdict c9_support()
{
    const auto& c = solved().at(4);
    const auto sol = to_piecewise(c.prob, c.state.z);
    const auto& dec = c.state.decomposition;
    const auto interfaces = find_interfaces(sol, c.prob.grid, dec);
    int checks = 0, failed = 0;
    double excess = -kInf;
    for (const auto& ip : interfaces)
        for (int k = 1; k <= 9; ++k) {
            const auto r = support_check(sol, c.prob.grid, ip.x, 0.1 * k, -1.0, &dec.values);
            ++checks;
            failed += r.ok ? 0 : 1;
            excess = std::max(excess, r.max_excess);
        }
    return {!interfaces.empty() && failed == 0,
            std::to_string(interfaces.size()) + " interfaces, " + std::to_string(checks) +
                " supports, " + std::to_string(failed) + " failed, max excess " + sci(excess)};
}

Verdict c10_sections()
{
    int checked = 0, failed = 0;
    double worst = kInf;
    for (const auto& [n, c] : solved()) {
        const auto sol = to_piecewise(c.prob, c.state.z);
        for (std::size_t i = 0; i < sol.size(); ++i)
            for (double sigma : {0.01, 0.05}) {
                const auto r = section_convexity(sol, c.prob.grid, i, sigma);
                ++checked;
                failed += r.status == Status::Pass ? 0 : 1;
                worst = std::min(worst, r.extremal_value);
            }
    }
    return {failed == 0, std::to_string(checked) + " sections, " + std::to_string(failed) +
                             " failed, min hull ratio " + sci(worst) + " (2-cell band)"};
}

double quartic_residual(int res)
{
    auto gf = make_generating_function("quadratic_ot", 2);
    const auto fn = GridFunction::sample(SourceGrid(box2(-1.0, 1.0), {res, res}), [](const Vec& x) {
        return x.squaredNorm() + 0.1 * x.array().pow(4).sum();
    });
    const DensityRatio psi = [](const Vec& x, double, const Vec&) {
        return (1.0 + 1.2 * x.array().square()).prod();
    };
    return ma_residual(*gf, fn, psi).max_abs;
}

Verdict c11_residuals()
{
    const DensityRatio zero = [](const Vec&, double, const Vec&) { return 0.0; };
    const DensityRatio one = [](const Vec&, double, const Vec&) { return 1.0; };
    bool ok = true;
    std::string detail = "G-affine:";
    struct Case
    {
        const char* kind;
        Box box;
        Vec y;
        double z;
    };
    for (const auto& c : {Case{"quadratic_ot", box2(-1, 1), v2(0.3, -0.2), 0.4},
                          Case{"parallel_beam", box2(0, 1), v2(0.3, 0.6), 0.6},
                          Case{"point_source", box2(-0.4, 0.4), v2(0.5, 0.5), 1.0}}) {
        auto gf = make_generating_function(c.kind, 2, -1.0);
        const SourceGrid grid(c.box, {256, 256});
        const auto fn = GridFunction::sample(
            grid, [&](const Vec& x) { return gf->value(view(x), view(c.y), c.z); });
        double scale = 0.0;
        for (std::size_t k = 0; k < grid.cell_count(); ++k)
            if (grid.is_interior(k, 1))
                scale = std::max(scale, node_jet(fn, k).d2u.squaredNorm());
        const auto r = ma_residual(*gf, fn, zero);
        ok = ok && r.masked == 0 && r.max_abs <= 1e-8 * (1.0 + scale);
        detail += " " + std::string(c.kind) + " " + sci(r.max_abs);
    }
    auto q = make_generating_function("quadratic_ot", 2);
    const auto sq = GridFunction::sample(SourceGrid(box2(-1, 1), {64, 64}),
                                         [](const Vec& x) { return x.squaredNorm(); });
    const double rq = ma_residual(*q, sq, one).max_abs;
    const double rate = std::log2(quartic_residual(64) / quartic_residual(256)) / 2.0;
    ok = ok && rq <= 1e-6 && rate >= 1.8;
    return {ok, detail + " (tol 1e-8 scale); |x|^2 " + sci(rq) + " (tol 1e-6); rate " + sci(rate) +
                    " (>= 1.8)"};
}

Verdict c12_point_source()
{
    auto ps0 = make_generating_function("point_source", 2, 0.0);
    bool a_zero = true;
    for (const auto& s : draw_samples(*ps0, spec_for("point_source", 40, 15))) {
        const auto b = ps0->derivatives(s.x, s.y, s.z);
        a_zero = a_zero && (matrix_A(*ps0, s.x, b.value, b.grad_x).array() == 0.0).all();
    }

    const double tau = -1.0;
    auto ps = make_generating_function("point_source", 2, tau);
    ForwardOptions numeric;
    numeric.closed_form_guess = false;
    double worst = 0.0;
    int count = 0;
    for (const auto& s : draw_samples(*ps, spec_for("point_source", 100, 15))) {
        const auto b = ps->derivatives(s.x, s.y, s.z);
        const double u = b.value;
        const Vec& p = b.grad_x;
        const double ubar = u - p.dot(s.x);
        const double root = std::sqrt(1.0 - s.x.squaredNorm());
        const double z_cf = (1.0 - 2.0 * tau * u / root) / (ubar * ubar - p.squaredNorm());
        worst = std::max(worst, rel_unit(forward_YZ(*ps, s.x, u, p, numeric).z, z_cf));
        ++count;
    }
    const auto rep = check_G3_family(*ps, spec_for("point_source", 200, 15), true);
    const bool g3 = rep.find("G3")->status == Status::Pass && rep.find("G3*")->status == Status::Pass;
    return {a_zero && count == 500 && worst <= 1e-8 && g3,
            std::string("tau=0 A exactly 0: ") + (a_zero ? "yes" : "no") + "; Z vs closed form " +
                sci(worst) + " on " + std::to_string(count) + " (tol 1e-8); tau=-1 strict G3 min " +
                sci(rep.find("G3")->extremal_value) + ", G3* min " +
                sci(rep.find("G3*")->extremal_value)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict c13_determinism()
{
    const fs::path dir = fs::temp_directory_path() /
                         ("gjet_acceptance_" + std::to_string(Clock::now().time_since_epoch().count()));
    fs::create_directories(dir);
    const std::string config = R"({
  "generator": {"kind": "parallel_beam"},
  "dimension": 2,
  "source": {"box": {"lo": [0, 0], "hi": [1, 1]}, "resolution": [256, 256], "density": "uniform"},
  "targets": {
    "points": [[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]],
    "masses": [0.25, 0.25, 0.25, 0.25]
  },
  "normalization": {"x0": [0.5, 0.5], "u0": 1.0},
  "check": {"samples": 100, "seed": 7}
})";
    cli::write_file(dir / "config.json", config);
    std::ostringstream log;
    int bad_exit = 0;
    for (const std::string pass : {"a", "b"}) {
        bad_exit += cli::cmd_solve(dir / "config.json", dir / ("sol_" + pass + ".json"),
                                   dir / ("grid_" + pass + ".csv"), log) != 0;
        bad_exit += cli::cmd_report(dir / ("sol_" + pass + ".json"), dir / ("report_" + pass + ".csv"),
                                    log) != 0;
        bad_exit += cli::cmd_check(dir / "config.json", dir / ("check_" + pass + ".json"), log) != 0;
    }
    int differ = 0;
    for (const std::string stem : {"sol_%.json", "grid_%.csv", "report_%.csv", "check_%.json"}) {
        auto name = [&](const char* pass) {
            std::string s = stem;
            s.replace(s.find('%'), 1, pass);
            return dir / s;
        };
        const auto a = slurp(name("a"));
        differ += (a.empty() || a != slurp(name("b"))) ? 1 : 0;
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    return {bad_exit == 0 && differ == 0, "solution, grid, report and check outputs: " +
                                              std::to_string(differ) + " differ, " +
                                              std::to_string(bad_exit) + " nonzero exits"};
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"parallel beam closed forms", c1_parallel_beam_closed_forms},
        {"A formula equivalence", c2_A_equivalence},
        {"MTW tensor values", c3_mtw_values},
        {"primal/dual tensor signs", c4_duality},
        {"semi-discrete solves", c5_solves},
        {"oracle equivalence", c6_oracle},
        {"Lipschitz bound", c7_lipschitz},
        {"involution", c8_involution},
        {"interpolated supports", c9_support},
        {"section convexity", c10_sections},
        {"residual diagnostics", c11_residuals},
        {"point source", c12_point_source},
        {"determinism", c13_determinism},
    };
    int failures = 0;
    int id = 0;
    for (const auto& [name, run] : criteria) {
        ++id;
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::printf("%s %2d %-28s %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", id, name,
                    v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", id - failures, id);
    return failures == 0 ? 0 : 1;
}
