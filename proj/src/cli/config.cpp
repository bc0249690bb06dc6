#include "gjet/cli/config.hpp"

#include "gjet/core/errors.hpp"
#include "gjet/genfun/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace gjet::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw Error(ErrorKind::ConfigError, msg);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!j.is_object())
        fail(where + " must be an object");
    for (const auto& item : j.items()) {
        const bool known = std::any_of(keys.begin(), keys.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known)
            fail("unknown key '" + item.key() + "' in " + where);
    }
}

const json& require(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key))
        fail("missing key '" + std::string(key) + "' in " + where);
    return j.at(key);
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number())
        fail(where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        fail(where + " must be finite");
    return v;
}

double positive(const json& j, const std::string& where)
{
    const double v = number(j, where);
    if (!(v > 0.0))
        fail(where + " must be positive");
    return v;
}

int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer())
        fail(where + " must be an integer");
    return j.get<int>();
}

Vec vector_of(const json& j, int dim, const std::string& where)
{
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        fail(where + " must be an array of " + std::to_string(dim) + " numbers");
    Vec v(dim);
    for (int i = 0; i < dim; ++i)
        v[i] = number(j[static_cast<std::size_t>(i)], where);
    return v;
}

Box box_of(const json& j, int dim, const std::string& where)
{
    allow_keys(j, where, {"lo", "hi"});
    Box b{vector_of(require(j, "lo", where), dim, where + ".lo"),
          vector_of(require(j, "hi", where), dim, where + ".hi")};
    for (int i = 0; i < dim; ++i)
        if (!(b.lo[i] < b.hi[i]))
            fail(where + " needs lo < hi on every axis");
    return b;
}

json vec_json(const Vec& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

json box_json(const Box& b)
{
    return json{{"lo", vec_json(b.lo)}, {"hi", vec_json(b.hi)}};
}

std::vector<double> read_density_csv(const std::string& path, std::size_t cells)
{
    std::ifstream in(path);
    if (!in)
        fail("cannot open density file " + path);
    std::vector<double> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(line, &used);
            if (line.find_first_not_of(" \t", used) != std::string::npos)
                fail("density file " + path + ": one value per line expected");
            out.push_back(v);
        } catch (const std::invalid_argument&) {
            // A single header row is allowed.
            if (!first)
                fail("density file " + path + ": unreadable value '" + line + "'");
        } catch (const std::out_of_range&) {
            fail("density file " + path + ": value out of range");
        }
        first = false;
    }
    if (out.size() != cells)
        fail("density file " + path + " has " + std::to_string(out.size()) + " values for " +
             std::to_string(cells) + " cells");
    return out;
}

}  // namespace

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(path.string() + ": " + e.what());
    }
}

Config parse_config(const json& j, const std::filesystem::path& base_dir)
{
    allow_keys(j, "config",
               {"generator", "dimension", "source", "targets", "normalization", "solver", "check"});
    Config cfg;
    cfg.dimension = integer(require(j, "dimension", "config"), "dimension");
    const int n = cfg.dimension;
    if (n < 1 || n > 3)
        fail("dimension must be 1, 2 or 3");

    const auto& gen = require(j, "generator", "config");
    allow_keys(gen, "generator", {"kind", "params"});
    const auto& kind = require(gen, "kind", "generator");
    if (!kind.is_string())
        fail("generator.kind must be a string");
    cfg.generator.kind = kind.get<std::string>();
    if (cfg.generator.kind != "quadratic_ot" && cfg.generator.kind != "parallel_beam" &&
        cfg.generator.kind != "point_source")
        fail("unknown generator kind '" + cfg.generator.kind + "'");
    if (gen.contains("params")) {
        const auto& params = gen.at("params");
        allow_keys(params, "generator.params", {"tau"});
        if (params.contains("tau")) {
            if (cfg.generator.kind != "point_source")
                fail("generator.params.tau applies to point_source only");
            cfg.generator.tau = number(params.at("tau"), "generator.params.tau");
            if (cfg.generator.tau > 0.0)
                fail("generator.params.tau must be <= 0");
        }
    }

    const auto& src = require(j, "source", "config");
    allow_keys(src, "source", {"box", "resolution", "density"});
    cfg.source.box = box_of(require(src, "box", "source"), n, "source.box");
    const auto& res = require(src, "resolution", "source");
    if (!res.is_array() || static_cast<int>(res.size()) != n)
        fail("source.resolution must be an array of " + std::to_string(n) + " integers");
    for (const auto& r : res) {
        const int k = integer(r, "source.resolution");
        if (k < 3)
            fail("source.resolution entries must be at least 3");
        cfg.source.resolution.push_back(k);
    }
    if (src.contains("density")) {
        const auto& d = src.at("density");
        if (d.is_string()) {
            if (d.get<std::string>() != "uniform")
                fail("source.density must be \"uniform\" or {\"csv\": path}");
        } else {
            allow_keys(d, "source.density", {"csv"});
            const auto& p = require(d, "csv", "source.density");
            if (!p.is_string())
                fail("source.density.csv must be a string");
            std::filesystem::path path(p.get<std::string>());
            if (path.is_relative() && !base_dir.empty())
                path = base_dir / path;
            cfg.source.density_csv = path.lexically_normal().string();
        }
    }

    if (j.contains("targets")) {
        const auto& t = j.at("targets");
        allow_keys(t, "targets", {"points", "masses"});
        const auto& pts = require(t, "points", "targets");
        const auto& ms = require(t, "masses", "targets");
        if (!pts.is_array() || pts.empty())
            fail("targets.points must be a nonempty array");
        if (!ms.is_array() || ms.size() != pts.size())
            fail("targets.masses must have one entry per point");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cfg.targets.push_back(vector_of(pts[i], n, "targets.points"));
            cfg.masses.push_back(positive(ms[i], "targets.masses"));
        }
    }

    if (j.contains("normalization")) {
        const auto& a = j.at("normalization");
        allow_keys(a, "normalization", {"x0", "u0"});
        cfg.normalization = Anchor{vector_of(require(a, "x0", "normalization"), n, "normalization.x0"),
                                   number(require(a, "u0", "normalization"), "normalization.u0")};
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        allow_keys(s, "solver", {"mass_tol_rel", "anchor_tol", "max_sweeps", "z_tol"});
        if (s.contains("mass_tol_rel"))
            cfg.solver.mass_tol_rel = positive(s.at("mass_tol_rel"), "solver.mass_tol_rel");
        if (s.contains("anchor_tol"))
            cfg.solver.anchor_tol = positive(s.at("anchor_tol"), "solver.anchor_tol");
        if (s.contains("max_sweeps")) {
            cfg.solver.max_sweeps = integer(s.at("max_sweeps"), "solver.max_sweeps");
            if (cfg.solver.max_sweeps < 1)
                fail("solver.max_sweeps must be at least 1");
        }
        if (s.contains("z_tol"))
            cfg.solver.z_tol = positive(s.at("z_tol"), "solver.z_tol");
    }

    if (j.contains("check")) {
        const auto& c = j.at("check");
        allow_keys(c, "check",
                   {"samples", "seed", "fd_step", "g3", "g3_min", "weak_tol", "x_region", "y_region"});
        if (c.contains("samples")) {
            cfg.check.samples = integer(c.at("samples"), "check.samples");
            if (cfg.check.samples < 1)
                fail("check.samples must be at least 1");
        }
        if (c.contains("seed")) {
            if (!c.at("seed").is_number_unsigned())
                fail("check.seed must be a nonnegative integer");
            cfg.check.seed = c.at("seed").get<std::uint64_t>();
        }
        if (c.contains("fd_step")) {
            cfg.check.fd_step = number(c.at("fd_step"), "check.fd_step");
            if (cfg.check.fd_step < 0.0)
                fail("check.fd_step must be >= 0");
        }
        if (c.contains("g3")) {
            const auto& g = c.at("g3");
            if (!g.is_string() || (g != "strict" && g != "weak"))
                fail("check.g3 must be \"strict\" or \"weak\"");
            cfg.check.strict_g3 = g == "strict";
        }
        if (c.contains("g3_min"))
            cfg.check.g3_min = number(c.at("g3_min"), "check.g3_min");
        if (c.contains("weak_tol"))
            cfg.check.weak_tol = positive(c.at("weak_tol"), "check.weak_tol");
        if (c.contains("x_region"))
            cfg.check.x_region = box_of(c.at("x_region"), n, "check.x_region");
        if (c.contains("y_region"))
            cfg.check.y_region = box_of(c.at("y_region"), n, "check.y_region");
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path)
{
    return parse_config(read_json(path), path.parent_path());
}

json resolved_json(const Config& cfg)
{
    json j;
    j["generator"] = {{"kind", cfg.generator.kind}, {"params", json::object()}};
    if (cfg.generator.kind == "point_source")
        j["generator"]["params"]["tau"] = cfg.generator.tau;
    j["dimension"] = cfg.dimension;
    json src{{"box", box_json(cfg.source.box)}, {"resolution", cfg.source.resolution}};
    if (cfg.source.density_csv.empty())
        src["density"] = "uniform";
    else
        src["density"] = {{"csv", cfg.source.density_csv}};
    j["source"] = src;
    if (!cfg.targets.empty()) {
        json pts = json::array();
        for (const auto& y : cfg.targets)
            pts.push_back(vec_json(y));
        j["targets"] = {{"points", pts}, {"masses", cfg.masses}};
    }
    json solver{{"mass_tol_rel", cfg.solver.mass_tol_rel},
                {"max_sweeps", cfg.solver.max_sweeps},
                {"z_tol", cfg.solver.z_tol}};
    if (cfg.normalization) {
        j["normalization"] = {{"x0", vec_json(cfg.normalization->x0)},
                              {"u0", cfg.normalization->u0}};
        solver["anchor_tol"] = cfg.solver.anchor_tolerance(cfg.normalization->u0);
    } else if (cfg.solver.anchor_tol >= 0.0) {
        solver["anchor_tol"] = cfg.solver.anchor_tol;
    }
    j["solver"] = solver;
    const auto spec = make_sample_spec(cfg);
    j["check"] = {{"samples", cfg.check.samples},
                  {"seed", cfg.check.seed},
                  {"fd_step", cfg.check.fd_step},
                  {"g3", cfg.check.strict_g3 ? "strict" : "weak"},
                  {"g3_min", cfg.check.g3_min},
                  {"weak_tol", cfg.check.weak_tol},
                  {"x_region", box_json(spec.x_region)},
                  {"y_region", box_json(spec.y_region)}};
    return j;
}

std::shared_ptr<const GeneratingFunction> make_gf(const Config& cfg)
{
    return make_generating_function(cfg.generator.kind, cfg.dimension, cfg.generator.tau);
}

SourceGrid make_grid(const Config& cfg)
{
    if (cfg.source.density_csv.empty())
        return SourceGrid(cfg.source.box, cfg.source.resolution);
    std::size_t cells = 1;
    for (int r : cfg.source.resolution)
        cells *= static_cast<std::size_t>(r);
    return SourceGrid(cfg.source.box, cfg.source.resolution,
                      read_density_csv(cfg.source.density_csv, cells));
}

SemiDiscreteProblem make_problem(const Config& cfg)
{
    if (cfg.targets.empty())
        fail("solving needs a targets section");
    if (!cfg.normalization)
        fail("solving needs a normalization section");
    return SemiDiscreteProblem{make_gf(cfg), make_grid(cfg), cfg.targets, cfg.masses,
                               *cfg.normalization, cfg.solver};
}

SampleSpec make_sample_spec(const Config& cfg)
{
    SampleSpec spec;
    spec.count = cfg.check.samples;
    spec.seed = cfg.check.seed;
    spec.x_region = cfg.check.x_region.value_or(cfg.source.box);
    spec.y_region = cfg.check.y_region.value_or(cfg.source.box);
    return spec;
}

CheckTolerances make_check_tolerances(const Config& cfg)
{
    CheckTolerances tol;
    tol.g3_min = cfg.check.g3_min;
    tol.weak_tol = cfg.check.weak_tol;
    tol.fd_step = cfg.check.fd_step;
    return tol;
}

}  // namespace gjet::cli
