#pragma once

#include "gjet/conditions/checks.hpp"
#include "gjet/conditions/sampling.hpp"
#include "gjet/core/grid.hpp"
#include "gjet/gconvex/piecewise.hpp"
#include "gjet/semidiscrete/problem.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gjet::cli {

inline constexpr int kSchemaVersion = 1;

struct GeneratorConfig
{
    std::string kind;
    double tau = 0.0;
};

struct SourceConfig
{
    Box box;
    std::vector<int> resolution;
    /// Per-cell density file; empty means uniform.
    std::string density_csv;
};

struct CheckConfig
{
    int samples = 200;
    std::uint64_t seed = 1;
    double fd_step = 0.0;
    bool strict_g3 = true;
    double g3_min = 1e-6;
    double weak_tol = 1e-6;
    std::optional<Box> x_region;
    std::optional<Box> y_region;
};

struct Config
{
    GeneratorConfig generator;
    int dimension = 0;
    SourceConfig source;
    std::vector<Vec> targets;
    std::vector<double> masses;
    std::optional<Anchor> normalization;
    SolverTolerances solver;
    CheckConfig check;
};

/// Parses and validates a configuration. Unknown keys, missing required
/// keys, wrong types and inconsistent dimensions raise ConfigError. Relative
/// file paths are resolved against base_dir.
Config parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

/// The configuration with every default filled in.
nlohmann::json resolved_json(const Config& cfg);

std::shared_ptr<const GeneratingFunction> make_gf(const Config& cfg);
SourceGrid make_grid(const Config& cfg);
/// Requires targets and a normalization.
SemiDiscreteProblem make_problem(const Config& cfg);
SampleSpec make_sample_spec(const Config& cfg);
CheckTolerances make_check_tolerances(const Config& cfg);

/// Reads a JSON file; malformed input raises ConfigError.
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace gjet::cli
