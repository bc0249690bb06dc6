#include "gjet/cli/commands.hpp"
#include "gjet/cli/config.hpp"
#include "gjet/cli/output.hpp"
#include "gjet/core/errors.hpp"

#include <doctest.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace gjet;
using namespace gjet::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp path, removed on scope exit.
class TempDir
{
  public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = fs::temp_directory_path() /
                ("gjet_cli_" + std::to_string(stamp) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    fs::path operator/(const std::string& name) const { return path_ / name; }

  private:
    fs::path path_;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path put(const TempDir& dir, const std::string& name, const std::string& text)
{
    const auto p = dir / name;
    write_file(p, text);
    return p;
}

json pb_config(int res = 32)
{
    auto j = json::parse(R"({
      "generator": {"kind": "parallel_beam"},
      "dimension": 2,
      "source": {"box": {"lo": [0, 0], "hi": [1, 1]}, "resolution": [32, 32], "density": "uniform"},
      "targets": {
        "points": [[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]],
        "masses": [0.25, 0.25, 0.25, 0.25]
      },
      "normalization": {"x0": [0.5, 0.5], "u0": 1.0},
      "check": {"samples": 60, "seed": 3}
    })");
    j["source"]["resolution"] = {res, res};
    return j;
}

json quad_config()
{
    return json::parse(R"({
      "generator": {"kind": "quadratic_ot"},
      "dimension": 2,
      "source": {"box": {"lo": [-1, -1], "hi": [1, 1]}, "resolution": [32, 32], "density": "uniform"},
      "normalization": {"x0": [0, 0], "u0": 0.0},
      "check": {"samples": 60, "seed": 3}
    })");
}

json single_target()
{
    auto j = pb_config();
    j["targets"] = {{"points", {{0.4, 0.6}}}, {"masses", {1.0}}};
    return j;
}

}  // namespace

TEST_CASE("config parsing")
{
    const auto cfg = parse_config(pb_config());
    CHECK(cfg.generator.kind == "parallel_beam");
    CHECK(cfg.dimension == 2);
    CHECK(cfg.targets.size() == 4);
    CHECK(cfg.check.samples == 60);
    CHECK(cfg.check.strict_g3);
    CHECK(cfg.solver.max_sweeps == 500);
    REQUIRE(cfg.normalization.has_value());
    CHECK(cfg.normalization->u0 == 1.0);

    // defaults are written back out and parse to the same thing
    const auto again = parse_config(resolved_json(cfg));
    CHECK(resolved_json(again) == resolved_json(cfg));

    auto bad = pb_config();
    bad["solver"] = {{"mass_tol", 1e-3}};
    CHECK_THROWS_AS(parse_config(bad), Error);
    bad = pb_config();
    bad["extra"] = 1;
    CHECK_THROWS_AS(parse_config(bad), Error);
    bad = pb_config();
    bad["generator"]["kind"] = "spherical";
    CHECK_THROWS_AS(parse_config(bad), Error);
    bad = pb_config();
    bad["generator"]["params"] = {{"tau", -1.0}};
    CHECK_THROWS_AS(parse_config(bad), Error);
    bad = pb_config();
    bad["targets"]["points"][1] = {0.5};
    CHECK_THROWS_AS(parse_config(bad), Error);
    bad = pb_config();
    bad["source"]["resolution"] = {2, 32};
    CHECK_THROWS_AS(parse_config(bad), Error);
    bad = pb_config();
    bad["targets"]["masses"][0] = -0.25;
    CHECK_THROWS_AS(parse_config(bad), Error);

    auto ps = quad_config();
    ps["generator"] = {{"kind", "point_source"}, {"params", {{"tau", 0.5}}}};
    CHECK_THROWS_AS(parse_config(ps), Error);
    ps["generator"]["params"]["tau"] = -0.5;
    CHECK(parse_config(ps).generator.tau == -0.5);
}

TEST_CASE("density from csv")
{
    TempDir dir;
    std::string csv = "density\n";
    for (int i = 0; i < 16; ++i)
        csv += (i % 2 == 0 ? "1\n" : "3\n");
    put(dir, "f.csv", csv);
    auto j = quad_config();
    j["source"]["resolution"] = {4, 4};
    j["source"]["density"] = {{"csv", "f.csv"}};
    const auto p = put(dir, "c.json", j.dump());
    const auto grid = make_grid(load_config(p));
    CHECK(grid.density(0) == 1.0);
    CHECK(grid.density(1) == 3.0);
    CHECK(grid.total_mass() == doctest::Approx(8.0).epsilon(1e-14));

    put(dir, "short.csv", "1\n2\n");
    j["source"]["density"] = {{"csv", "short.csv"}};
    CHECK_THROWS_AS(make_grid(load_config(put(dir, "c2.json", j.dump()))), Error);
    put(dir, "neg.csv", std::string("-1\n") + csv.substr(10));
    j["source"]["density"] = {{"csv", "neg.csv"}};
    CHECK_THROWS_AS(make_grid(load_config(put(dir, "c3.json", j.dump()))), Error);
}

TEST_CASE("input errors exit 4")
{
    TempDir dir;
    std::ostringstream log;
    const auto out = dir / "o.json";
    CHECK(cmd_check(put(dir, "bad.json", "{\"generator\": "), out, log) == kExitInputError);
    auto unknown = pb_config();
    unknown["source"]["spacing"] = 0.1;
    CHECK(cmd_check(put(dir, "u.json", unknown.dump()), out, log) == kExitInputError);
    CHECK(cmd_solve(dir / "missing.json", out, std::nullopt, log) == kExitInputError);
    CHECK(cmd_transform(put(dir, "trunc.json", "{\"schema_version\": 1, \"z\": [1.0,"), out, log) ==
          kExitInputError);
    CHECK(cmd_report(put(dir, "nov.json", "{\"z\": []}"), dir / "r.csv", log) == kExitInputError);
    CHECK(log.str().find("error") != std::string::npos);
}

TEST_CASE("check")
{
    TempDir dir;
    std::ostringstream log;
    const auto out = dir / "report.json";
    CHECK(cmd_check(put(dir, "pb.json", pb_config().dump()), out, log) == kExitOk);
    const auto rep = json::parse(slurp(out));
    CHECK(rep.at("schema_version") == kSchemaVersion);
    CHECK(rep.at("config").at("generator").at("kind") == "parallel_beam");
    CHECK(rep.at("any_fail") == false);
    bool saw_g3 = false;
    for (const auto& r : rep.at("records"))
        if (r.at("name") == "G3") {
            saw_g3 = true;
            CHECK(r.at("status") == "pass");
        }
    CHECK(saw_g3);

    // strict G3 on the quadratic cost: the tensor vanishes
    CHECK(cmd_check(put(dir, "q.json", quad_config().dump()), out, log) == kExitConditionFailure);
    auto weak = quad_config();
    weak["check"]["g3"] = "weak";
    CHECK(cmd_check(put(dir, "qw.json", weak.dump()), out, log) == kExitOk);
}

TEST_CASE("solve")
{
    TempDir dir;
    std::ostringstream log;
    const auto out = dir / "sol.json";
    const auto grid = dir / "grid.csv";
    CHECK(cmd_solve(put(dir, "one.json", single_target().dump()), out, grid, log) == kExitOk);
    auto sol = json::parse(slurp(out));
    CHECK(sol.at("residual") == 0.0);
    CHECK(sol.at("z").size() == 1);

    CHECK(cmd_solve(put(dir, "four.json", pb_config(64).dump()), out, grid, log) == kExitOk);
    sol = json::parse(slurp(out));
    const auto& m = sol.at("masses");
    REQUIRE(m.size() == 4);
    for (const auto& v : m)
        CHECK(v.get<double>() == doctest::Approx(m[0].get<double>()).epsilon(1e-12));
    CHECK(sol.at("residual").get<double>() <= 1e-4);
    CHECK(sol.contains("anchor_value"));
    CHECK(sol.contains("sweeps"));

    const auto text = slurp(grid);
    CHECK(text.rfind("x1,x2,u,du1,du2,cell\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 64 * 64 + 1);
    CHECK(text.find('\r') == std::string::npos);

    auto heavy = pb_config();
    heavy["targets"]["masses"] = {0.3, 0.25, 0.25, 0.25};
    std::ostringstream why;
    CHECK(cmd_solve(put(dir, "heavy.json", heavy.dump()), out, std::nullopt, why) ==
          kExitInputError);
    CHECK(why.str().find("MassImbalance") != std::string::npos);

    auto capped = pb_config(48);
    capped["targets"]["masses"] = {0.3, 0.2, 0.15, 0.35};
    capped["solver"] = {{"max_sweeps", 1}, {"mass_tol_rel", 1e-12}};
    CHECK(cmd_solve(put(dir, "capped.json", capped.dump()), out, std::nullopt, log) ==
          kExitNoConvergence);
}

TEST_CASE("transform")
{
    TempDir dir;
    std::ostringstream log;
    const auto sol = dir / "sol.json";
    const auto out = dir / "dual.json";
    REQUIRE(cmd_solve(put(dir, "four.json", pb_config().dump()), sol, std::nullopt, log) == kExitOk);
    CHECK(cmd_transform(sol, out, log) == kExitOk);
    auto d = json::parse(slurp(out));
    CHECK(d.at("involution_error").get<double>() <= 1e-6);
    CHECK(d.at("v").size() == 4);

    REQUIRE(cmd_solve(put(dir, "one.json", single_target().dump()), sol, std::nullopt, log) ==
            kExitOk);
    CHECK(cmd_transform(sol, out, log) == kExitOk);
    d = json::parse(slurp(out));
    const auto s = json::parse(slurp(sol));
    CHECK(d.at("v")[0].get<double>() == doctest::Approx(s.at("z")[0].get<double>()).epsilon(1e-12));

    const auto text = slurp(sol);
    CHECK(cmd_transform(put(dir, "cut.json", text.substr(0, text.size() / 2)), out, log) ==
          kExitInputError);
}

TEST_CASE("residual")
{
    TempDir dir;
    std::ostringstream log;
    auto q = quad_config();
    q["source"]["resolution"] = {64, 64};
    const auto qc = put(dir, "q.json", q.dump());

    auto run = [&](ResidualRequest req, std::string& text) {
        std::ostringstream out;
        const int code = cmd_residual(req, out, log);
        text = out.str();
        return code;
    };
    auto value = [](const std::string& text, const std::string& key) {
        std::istringstream in(text);
        std::string k, v;
        while (in >> k >> v)
            if (k == key)
                return v;
        return std::string();
    };

    std::string text;
    ResidualRequest req{qc, std::nullopt, std::string("g_affine"), dir / "field.csv"};
    CHECK(run(req, text) == kExitOk);
    CHECK(std::stod(value(text, "max_abs_residual")) <= 1e-8);
    CHECK(value(text, "ellipticity") == "degenerate");
    const auto field = slurp(dir / "field.csv");
    CHECK(field.rfind("x1,x2,residual,min_eigenvalue\n", 0) == 0);
    CHECK(std::count(field.begin(), field.end(), '\n') == 64 * 64 + 1);

    req = ResidualRequest{qc, std::nullopt, std::string("quadratic_ot_identity"), std::nullopt};
    CHECK(run(req, text) == kExitOk);
    CHECK(std::stod(value(text, "max_abs_residual")) <= 1e-6);
    CHECK(value(text, "ellipticity") == "elliptic");

    req.manufactured = "quadratic_ot_quartic";
    CHECK(run(req, text) == kExitOk);
    CHECK(std::stod(value(text, "max_abs_residual")) <= 1e-2);

    const auto pbc = put(dir, "pb.json", pb_config().dump());
    req = ResidualRequest{pbc, std::nullopt, std::string("quadratic_ot_identity"), std::nullopt};
    CHECK(run(req, text) == kExitInputError);
    req.manufactured = "sphere";
    CHECK(run(req, text) == kExitInputError);

    // a solved piecewise function is degenerate elliptic away from the kinks
    const auto sol = dir / "sol.json";
    REQUIRE(cmd_solve(pbc, sol, std::nullopt, log) == kExitOk);
    req = ResidualRequest{{}, sol, std::nullopt, std::nullopt};
    CHECK(run(req, text) == kExitOk);
    CHECK(value(text, "input") == "solution");
    CHECK(value(text, "ellipticity") == "degenerate");
    CHECK(!value(text, "masked").empty());

    req = ResidualRequest{qc, sol, std::string("g_affine"), std::nullopt};
    CHECK(run(req, text) == kExitInputError);
}

TEST_CASE("report")
{
    TempDir dir;
    std::ostringstream log;
    const auto sol = dir / "sol.json";
    const auto csv = dir / "r.csv";
    REQUIRE(cmd_solve(put(dir, "four.json", pb_config().dump()), sol, std::nullopt, log) == kExitOk);
    CHECK(cmd_report(sol, csv, log) == kExitOk);
    const auto text = slurp(csv);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "node,x1,x2,u,du1,du2,cell");
    std::size_t rows = 0, footer = 0;
    while (std::getline(in, line)) {
        if (line.rfind("#piece", 0) == 0) {
            ++footer;
            continue;
        }
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 2 * 2 + 2);
    }
    CHECK(rows == 32u * 32u);
    CHECK(footer == 5u);

    // deterministic rerun
    const auto csv2 = dir / "r2.csv";
    CHECK(cmd_report(sol, csv2, log) == kExitOk);
    CHECK(slurp(csv2) == text);

    // no pieces
    auto s = json::parse(slurp(sol));
    s["config"].erase("targets");
    s["z"] = json::array();
    s["masses"] = json::array();
    CHECK(cmd_report(put(dir, "empty.json", s.dump()), csv, log) == kExitInputError);
}

TEST_CASE("outputs are byte stable")
{
    TempDir dir;
    std::ostringstream log;
    const auto cfg = put(dir, "four.json", pb_config().dump());
    for (const char* name : {"a", "b"}) {
        const std::string n(name);
        REQUIRE(cmd_solve(cfg, dir / (n + ".json"), dir / (n + ".csv"), log) == kExitOk);
        REQUIRE(cmd_check(cfg, dir / (n + "_check.json"), log) == kExitOk);
    }
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a_check.json") == slurp(dir / "b_check.json"));
    CHECK(format_double(0.1) == "0.10000000000000001");
}
