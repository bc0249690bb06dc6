#pragma once

#include "gjet/conditions/report.hpp"
#include "gjet/core/grid.hpp"
#include "gjet/gconvex/piecewise.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace gjet::cli {

/// 17 significant digits, '.' decimal point.
std::string format_double(double v);

nlohmann::json vec_to_json(const Vec& v);
nlohmann::json report_to_json(const ConditionReport& report);

/// Writes bytes as given (no newline translation). Throws ConfigError.
void write_file(const std::filesystem::path& path, const std::string& text);
/// Two-space indented JSON followed by a newline.
std::string json_text(const nlohmann::json& j);

/// One row per cell: x1..xn, u, du1..dun, cell. With `node_column` a
/// leading node index is added. du is the gradient of the active piece.
std::string grid_csv(const PiecewiseGSolution& sol, const SourceGrid& grid, bool node_column);

}  // namespace gjet::cli
