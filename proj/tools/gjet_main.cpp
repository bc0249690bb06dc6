#include "gjet/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cli = gjet::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Generated Jacobian equation toolkit"};
    app.require_subcommand(1);

    std::string config, out, grid_out, solution, manufactured, field_out, csv;
    double ellip_tol = 1e-6;

    auto* check = app.add_subcommand("check", "Sample the structure conditions of a generator");
    check->add_option("config", config, "Configuration file")->required();
    check->add_option("--out", out, "Report JSON")->required();

    auto* solve = app.add_subcommand("solve", "Solve the semi-discrete problem");
    solve->add_option("config", config, "Configuration file")->required();
    solve->add_option("--out", out, "Solution JSON")->required();
    solve->add_option("--grid-out", grid_out, "Grid CSV");

    auto* transform = app.add_subcommand("transform", "Dual values and involution error");
    transform->add_option("solution", solution, "Solution JSON")->required();
    transform->add_option("--out", out, "Output JSON")->required();

    auto* residual = app.add_subcommand("residual", "Finite-difference residual diagnostics");
    residual->add_option("config", config, "Configuration file");
    auto* sol_opt = residual->add_option("--solution", solution, "Solution JSON");
    auto* man_opt = residual->add_option("--manufactured", manufactured,
                                         "g_affine, quadratic_ot_identity or quadratic_ot_quartic");
    sol_opt->excludes(man_opt);
    residual->add_option("--field-out", field_out, "Residual field CSV");
    residual->add_option("--ellip-tol", ellip_tol, "Ellipticity tolerance");

    auto* report = app.add_subcommand("report", "Plot data of a solution");
    report->add_option("solution", solution, "Solution JSON")->required();
    report->add_option("--csv", csv, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitInputError;
    }

    if (check->parsed())
        return cli::cmd_check(config, out, std::cerr);
    if (solve->parsed()) {
        std::optional<std::filesystem::path> g;
        if (!grid_out.empty())
            g = grid_out;
        return cli::cmd_solve(config, out, g, std::cerr);
    }
    if (transform->parsed())
        return cli::cmd_transform(solution, out, std::cerr);
    if (residual->parsed()) {
        cli::ResidualRequest req;
        req.config = config;
        if (*sol_opt)
            req.solution = solution;
        if (*man_opt)
            req.manufactured = manufactured;
        if (!field_out.empty())
            req.field_out = field_out;
        req.ellip_tol = ellip_tol;
        if (!req.solution && config.empty()) {
            std::cerr << "error: residual needs a config file or --solution\n";
            return cli::kExitInputError;
        }
        return cli::cmd_residual(req, std::cout, std::cerr);
    }
    return cli::cmd_report(solution, csv, std::cerr);
}
