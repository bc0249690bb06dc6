#include "gjet/cli/output.hpp"

#include "gjet/core/errors.hpp"

#include <cstdio>
#include <fstream>

namespace gjet::cli {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json vec_to_json(const Vec& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

json report_to_json(const ConditionReport& report)
{
    json recs = json::array();
    for (const auto& r : report.records) {
        json j{{"name", r.name},
               {"status", std::string(to_string(r.status))},
               {"samples_used", r.samples_used},
               {"samples_skipped", r.samples_skipped},
               {"note", r.note}};
        // Infinite extrema (no samples) are written as null.
        if (std::isfinite(r.extremal_value))
            j["extremal_value"] = r.extremal_value;
        else
            j["extremal_value"] = nullptr;
        if (r.witness) {
            const auto& w = *r.witness;
            json wj{{"x", vec_to_json(w.x)}, {"y", vec_to_json(w.y)}, {"z", w.z}};
            if (w.xi.size() > 0) {
                wj["xi"] = vec_to_json(w.xi);
                wj["eta"] = vec_to_json(w.eta);
            }
            j["witness"] = wj;
        } else {
            j["witness"] = nullptr;
        }
        recs.push_back(j);
    }
    return recs;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
    out << text;
    if (!out)
        throw Error(ErrorKind::ConfigError, "write failed for " + path.string());
}

std::string json_text(const json& j)
{
    return j.dump(2) + "\n";
}

std::string grid_csv(const PiecewiseGSolution& sol, const SourceGrid& grid, bool node_column)
{
    const int n = grid.dim();
    std::string out;
    if (node_column)
        out += "node,";
    for (int i = 0; i < n; ++i)
        out += "x" + std::to_string(i + 1) + ",";
    out += "u,";
    for (int i = 0; i < n; ++i)
        out += "du" + std::to_string(i + 1) + ",";
    out += "cell\n";
    const auto& gf = sol.gf();
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const Vec x = grid.center(c);
        const auto pv = eval_piecewise(sol, x);
        const auto& piece = sol.pieces()[static_cast<std::size_t>(pv.index)];
        const Vec du = gf.derivatives(x, piece.y, piece.z).grad_x;
        if (node_column)
            out += std::to_string(c) + ",";
        for (int i = 0; i < n; ++i)
            out += format_double(x[i]) + ",";
        out += format_double(pv.u) + ",";
        for (int i = 0; i < n; ++i)
            out += format_double(du[i]) + ",";
        out += std::to_string(pv.index) + "\n";
    }
    return out;
}

}  // namespace gjet::cli
