#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace gjet::cli {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConditionFailure = 2,
    kExitNoConvergence = 3,
    kExitInputError = 4,
};

/// Condition report for the configured generating function.
int cmd_check(const std::filesystem::path& config, const std::filesystem::path& out,
              std::ostream& log);

int cmd_solve(const std::filesystem::path& config, const std::filesystem::path& out,
              const std::optional<std::filesystem::path>& grid_out, std::ostream& log);

/// Per-target dual values and the involution error of a solution file.
int cmd_transform(const std::filesystem::path& solution, const std::filesystem::path& out,
                  std::ostream& log);

struct ResidualRequest
{
    std::filesystem::path config;
    std::optional<std::filesystem::path> solution;
    /// "g_affine", "quadratic_ot_identity" or "quadratic_ot_quartic".
    std::optional<std::string> manufactured;
    std::optional<std::filesystem::path> field_out;
    double ellip_tol = 1e-6;
};

/// Prints the residual summary to `out`. Exit 2 when the input is not
/// degenerate elliptic.
int cmd_residual(const ResidualRequest& req, std::ostream& out, std::ostream& log);

/// Plot-ready grid CSV with a per-piece mass footer.
int cmd_report(const std::filesystem::path& solution, const std::filesystem::path& csv,
               std::ostream& log);

}  // namespace gjet::cli
