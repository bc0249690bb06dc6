#include "gjet/cli/commands.hpp"

#include "gjet/cli/config.hpp"
#include "gjet/cli/output.hpp"
#include "gjet/conditions/checks.hpp"
#include "gjet/core/errors.hpp"
#include "gjet/gconvex/transforms.hpp"
#include "gjet/genfun/maps.hpp"
#include "gjet/madiag/residuals.hpp"
#include "gjet/semidiscrete/solver.hpp"

#include <cmath>
#include <ostream>

namespace gjet::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw Error(ErrorKind::ConfigError, msg);
}

template <class F>
int guarded(std::ostream& log, F body)
{
    try {
        return body();
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
    }
    return kExitInputError;
}

json header(const Config& cfg)
{
    return json{{"schema_version", kSchemaVersion}, {"config", resolved_json(cfg)}};
}

struct LoadedSolution
{
    Config cfg;
    std::vector<double> z;
    std::vector<double> masses;
};

LoadedSolution load_solution(const std::filesystem::path& path)
{
    const json j = read_json(path);
    if (!j.is_object() || !j.contains("schema_version") || j.at("schema_version") != kSchemaVersion)
        fail(path.string() + ": missing or unsupported schema_version");
    if (!j.contains("config"))
        fail(path.string() + ": no config section");
    LoadedSolution out{parse_config(j.at("config")), {}, {}};
    if (out.cfg.targets.empty() || !out.cfg.normalization)
        fail(path.string() + ": config has no pieces or normalization");
    for (const char* key : {"z", "masses"}) {
        if (!j.contains(key) || !j.at(key).is_array())
            fail(path.string() + ": missing array '" + key + "'");
        auto& dst = std::string(key) == "z" ? out.z : out.masses;
        for (const auto& v : j.at(key)) {
            if (!v.is_number() || !std::isfinite(v.get<double>()))
                fail(path.string() + ": non-numeric entry in '" + key + "'");
            dst.push_back(v.get<double>());
        }
        if (dst.size() != out.cfg.targets.size())
            fail(path.string() + ": '" + key + "' does not match the number of targets");
    }
    return out;
}

PiecewiseGSolution piecewise_of(const LoadedSolution& s)
{
    std::vector<GAffinePiece> pieces;
    for (std::size_t i = 0; i < s.z.size(); ++i)
        pieces.push_back({s.cfg.targets[i], s.z[i]});
    return PiecewiseGSolution(make_gf(s.cfg), std::move(pieces), *s.cfg.normalization);
}

SourceGrid geometry_grid(const Config& cfg)
{
    return SourceGrid(cfg.source.box, cfg.source.resolution);
}

}  // namespace

int cmd_check(const std::filesystem::path& config, const std::filesystem::path& out,
              std::ostream& log)
{
    return guarded(log, [&] {
        const auto cfg = load_config(config);
        const auto gf = make_gf(cfg);
        const auto spec = make_sample_spec(cfg);
        const auto tol = make_check_tolerances(cfg);
        ConditionReport report;
        report.records.push_back(check_injectivity(*gf, Side::Primal, spec, tol));
        report.records.push_back(check_injectivity(*gf, Side::Dual, spec, tol));
        report.records.push_back(check_G2(*gf, spec, tol));
        report.append(check_G3_family(*gf, spec, cfg.check.strict_g3, tol));
        report.records.push_back(check_G4w(*gf, spec, tol));
        report.records.push_back(check_G5(*gf, spec, std::nullopt, tol));

        json j = header(cfg);
        j["generator"] = gf->name();
        j["records"] = report_to_json(report);
        j["any_fail"] = report.any_fail();
        write_file(out, json_text(j));
        for (const auto& r : report.records)
            log << r.name << ": " << to_string(r.status) << "\n";
        return report.any_fail() ? kExitConditionFailure : kExitOk;
    });
}

int cmd_solve(const std::filesystem::path& config, const std::filesystem::path& out,
              const std::optional<std::filesystem::path>& grid_out, std::ostream& log)
{
    return guarded(log, [&] {
        const auto cfg = load_config(config);
        const auto prob = make_problem(cfg);
        const auto diags = validate_problem(prob);
        if (!diags.empty()) {
            for (const auto& d : diags)
                log << to_string(d.kind) << ": " << d.message << "\n";
            return static_cast<int>(kExitInputError);
        }
        SolutionState state;
        try {
            state = solve(prob);
        } catch (const Error& e) {
            log << "solver: " << e.what() << "\n";
            return static_cast<int>(kExitNoConvergence);
        }
        json j = header(cfg);
        j["z"] = state.z;
        j["masses"] = state.decomposition.masses;
        j["residual"] = state.residual;
        j["anchor_value"] = state.anchor_value;
        j["sweeps"] = state.sweeps;
        j["residual_history"] = state.residual_history;
        write_file(out, json_text(j));
        if (grid_out)
            write_file(*grid_out, grid_csv(to_piecewise(prob, state.z), prob.grid, false));
        log << "converged in " << state.sweeps << " sweeps, residual "
            << format_double(state.residual) << "\n";
        return static_cast<int>(kExitOk);
    });
}

int cmd_transform(const std::filesystem::path& solution, const std::filesystem::path& out,
                  std::ostream& log)
{
    return guarded(log, [&] {
        const auto s = load_solution(solution);
        const auto sol = piecewise_of(s);
        const auto grid = geometry_grid(s.cfg);
        const auto v = g_transform(sol, grid, s.cfg.targets);
        const auto back = dual_transform(sol.gf(), s.cfg.targets, v, grid);
        const auto dec = cell_masses(sol, grid);
        double err = 0.0;
        for (std::size_t c = 0; c < grid.cell_count(); ++c)
            err = std::max(err, std::abs(back[c] - dec.values[c]));
        json j = header(s.cfg);
        j["v"] = v;
        j["involution_error"] = err;
        write_file(out, json_text(j));
        log << "involution error " << format_double(err) << "\n";
        return static_cast<int>(kExitOk);
    });
}

int cmd_residual(const ResidualRequest& req, std::ostream& out, std::ostream& log)
{
    return guarded(log, [&] {
        if (req.solution.has_value() == req.manufactured.has_value())
            fail("give exactly one of --solution and --manufactured");
        Config cfg;
        std::optional<PiecewiseGSolution> sol;
        if (req.solution) {
            auto s = load_solution(*req.solution);
            sol = piecewise_of(s);
            cfg = s.cfg;
        } else {
            cfg = load_config(req.config);
        }
        const auto gf = make_gf(cfg);
        const auto grid = geometry_grid(cfg);
        const int n = cfg.dimension;

        std::function<double(const Vec&)> u;
        DensityRatio psi = [](const Vec&, double, const Vec&) { return 0.0; };
        std::string label;
        if (sol) {
            label = "solution";
            u = [&sol](const Vec& x) { return eval_piecewise(*sol, x).u; };
        } else if (*req.manufactured == "g_affine") {
            label = "g_affine";
            const Vec centre = 0.5 * (cfg.source.box.lo + cfg.source.box.hi);
            const Vec x0 = cfg.normalization ? cfg.normalization->x0 : centre;
            const double u0 = cfg.normalization ? cfg.normalization->u0 : 1.0;
            const Vec y0 = cfg.targets.empty() ? centre : cfg.targets.front();
            const double z0 = dual_value(*gf, view(x0), view(y0), u0);
            u = [gf, y0, z0](const Vec& x) { return gf->value(view(x), view(y0), z0); };
        } else if (*req.manufactured == "quadratic_ot_identity" ||
                   *req.manufactured == "quadratic_ot_quartic") {
            if (cfg.generator.kind != "quadratic_ot")
                fail(*req.manufactured + " needs the quadratic_ot generator");
            label = *req.manufactured;
            if (label == "quadratic_ot_identity") {
                u = [](const Vec& x) { return x.squaredNorm(); };
                psi = [](const Vec&, double, const Vec&) { return 1.0; };
            } else {
                u = [](const Vec& x) { return x.squaredNorm() + 0.1 * x.array().pow(4).sum(); };
                psi = [](const Vec& x, double, const Vec&) {
                    return (1.0 + 1.2 * x.array().square()).prod();
                };
            }
        } else {
            fail("unknown manufactured solution '" + *req.manufactured + "'");
        }

        const auto fn = GridFunction::sample(grid, u);
        const auto res = ma_residual(*gf, fn, psi);
        const auto ell = ellipticity_check(*gf, fn, req.ellip_tol);
        std::string verdict;
        if (!ell.admissible)
            verdict = "not_elliptic";
        else if (ell.min_value > req.ellip_tol)
            verdict = "elliptic";
        else
            verdict = "degenerate";

        out << "input " << label << "\n"
            << "max_abs_residual " << format_double(res.max_abs) << "\n"
            << "evaluated " << res.evaluated << "\n"
            << "masked " << res.masked << "\n"
            << "min_eigenvalue " << format_double(ell.min_value) << "\n"
            << "ellipticity " << verdict << "\n";

        if (req.field_out) {
            std::string csv;
            for (int i = 0; i < n; ++i)
                csv += "x" + std::to_string(i + 1) + ",";
            csv += "residual,min_eigenvalue\n";
            for (std::size_t c = 0; c < grid.cell_count(); ++c) {
                const Vec x = grid.center(c);
                for (int i = 0; i < n; ++i)
                    csv += format_double(x[i]) + ",";
                if (res.valid[c])
                    csv += format_double(res.values[c]);
                csv += ",";
                if (ell.min_eigenvalue.valid[c])
                    csv += format_double(ell.min_eigenvalue.values[c]);
                csv += "\n";
            }
            write_file(*req.field_out, csv);
        }
        return static_cast<int>(ell.admissible ? kExitOk : kExitConditionFailure);
    });
}

int cmd_report(const std::filesystem::path& solution, const std::filesystem::path& csv,
               std::ostream& log)
{
    return guarded(log, [&] {
        const auto s = load_solution(solution);
        const auto sol = piecewise_of(s);
        std::string text = grid_csv(sol, geometry_grid(s.cfg), true);
        text += "#piece,index,mass,target_mass\n";
        for (std::size_t i = 0; i < s.masses.size(); ++i)
            text += "#piece," + std::to_string(i) + "," + format_double(s.masses[i]) + "," +
                    format_double(s.cfg.masses[i]) + "\n";
        write_file(csv, text);
        return static_cast<int>(kExitOk);
    });
}

}  // namespace gjet::cli
