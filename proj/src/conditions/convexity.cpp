#include "gjet/conditions/convexity.hpp"

#include "gjet/conditions/checks.hpp"
#include "gjet/core/errors.hpp"
#include "gjet/core/geometry.hpp"
#include "gjet/core/random.hpp"
#include "gjet/genfun/maps.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace gjet {

namespace {

RasterRegion rasterize_radial(const SourceGrid& grid, const Vec& center, double r_in, double r_out)
{
    RasterRegion region{grid, std::vector<char>(grid.cell_count(), 0)};
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const double r = (grid.center(c) - center).norm();
        region.mask[c] = (r >= r_in && r <= r_out) ? 1 : 0;
    }
    return region;
}

}  // namespace

RasterRegion rasterize_annulus(const SourceGrid& grid, const Vec& center, double r_in, double r_out)
{
    return rasterize_radial(grid, center, r_in, r_out);
}

RasterRegion rasterize_ball(const SourceGrid& grid, const Ball& ball)
{
    return rasterize_radial(grid, ball.center, -1.0, ball.radius);
}

ConditionRecord mapped_region_convexity(const RasterRegion& region,
                                        const std::function<Vec(const Vec&)>& map,
                                        double band_cells, const std::string& name)
{
    const SourceGrid& grid = region.grid;
    const int n = grid.dim();
    if (n > 2)
        throw Error(ErrorKind::UnsupportedGeometry, "image convexity supports dimensions 1 and 2");
    ConditionRecord rec;
    rec.name = name;

    // Mapped vertices on the (res + 1)-lattice, computed once each.
    const auto& res = grid.resolution();
    const std::size_t nx = static_cast<std::size_t>(res[0]) + 1;
    const std::size_t ny = n == 2 ? static_cast<std::size_t>(res[1]) + 1 : 1;
    std::vector<std::optional<Vec>> cache(nx * ny);
    auto vertex = [&](std::size_t i, std::size_t j) -> const Vec& {
        auto& slot = cache[i + nx * j];
        if (!slot) {
            Vec v(n);
            v[0] = grid.box().lo[0] + static_cast<double>(i) * grid.spacing(0);
            if (n == 2)
                v[1] = grid.box().lo[1] + static_cast<double>(j) * grid.spacing(1);
            slot = map(v);
        }
        return *slot;
    };

    std::vector<std::vector<Vec>> cells;
    try {
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            if (!region.mask[c])
                continue;
            const auto idx = grid.multi_index(c);
            const auto i = static_cast<std::size_t>(idx[0]);
            if (n == 1) {
                cells.push_back({vertex(i, 0), vertex(i + 1, 0)});
            } else {
                const auto j = static_cast<std::size_t>(idx[1]);
                cells.push_back(
                    {vertex(i, j), vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)});
            }
        }
    } catch (const Error& e) {
        rec.status = Status::Inconclusive;
        rec.note = std::string("map failed on the region: ") + e.what();
        return rec;
    }
    rec.samples_used = static_cast<int>(cells.size());
    if (cells.empty()) {
        rec.note = "empty region";
        return rec;
    }
    const auto cmp = geometry::compare_with_hull(n, cells, band_cells);
    rec.extremal_value = cmp.ratio;
    rec.status = cmp.convex ? Status::Pass : Status::Fail;
    std::ostringstream note;
    note.precision(6);
    note << "hull ratio " << cmp.ratio << ", threshold " << cmp.threshold;
    rec.note = note.str();
    return rec;
}

ConditionRecord check_boundary_convexity(const GeneratingFunction& gf, const Ball& omega,
                                         const ConvexityAnchor& anchor, int samples,
                                         std::uint64_t seed, double weak_tol)
{
    const int n = gf.dim();
    ConditionRecord rec;
    rec.name = "source_boundary";
    if (n < 2) {
        rec.note = "no tangent directions in one dimension";
        return rec;
    }
    if (!(omega.radius > 0.0))
        throw Error(ErrorKind::UnsupportedGeometry, "ball radius must be positive");
    Rng rng(seed);
    rec.extremal_value = kInf;
    for (int s = 0; s < samples; ++s) {
        const Vec gamma = rng.unit_vector(n);
        Vec tau;
        if (n == 2) {
            tau = Vec(2);
            tau << -gamma[1], gamma[0];
        } else {
            do {
                tau = rng.unit_vector(n);
                tau -= tau.dot(gamma) * gamma;
            } while (tau.norm() < 1e-6);
            tau.normalize();
        }
        const Vec x = omega.center + omega.radius * gamma;
        std::vector<Mat> dpa;
        try {
            dpa = dp_A_chainrule(gf, x, anchor.y0, anchor.z0);
        } catch (const Error&) {
            ++rec.samples_skipped;
            continue;
        }
        // For a ball D gamma = (I - gamma gamma^T) / R, so tau.D gamma.tau = 1/R.
        double v = 1.0 / omega.radius;
        for (int k = 0; k < n; ++k)
            v -= gamma[k] * tau.dot(dpa[static_cast<std::size_t>(k)] * tau);
        ++rec.samples_used;
        if (v < rec.extremal_value) {
            rec.extremal_value = v;
            rec.witness = Witness{x, anchor.y0, anchor.z0, gamma, tau};
        }
    }
    if (rec.samples_used == 0) {
        rec.note = "boundary not admissible for the anchor";
        return rec;
    }
    rec.status = rec.extremal_value >= -weak_tol ? Status::Pass : Status::Fail;
    return rec;
}

ConditionRecord check_image_convexity(const GeneratingFunction& gf, ConvexityKind kind,
                                      const RasterRegion& region, const ConvexityAnchor& anchor,
                                      double band_cells)
{
    if (kind == ConvexityKind::SourceImage) {
        return mapped_region_convexity(
            region, [&](const Vec& x) { return map_Q(gf, x, anchor.y0, anchor.z0); }, band_cells,
            "source_image");
    }
    if (kind == ConvexityKind::TargetImage) {
        return mapped_region_convexity(
            region,
            [&](const Vec& y) {
                const double z = dual_value(gf, view(anchor.x0), view(y), anchor.u0);
                return Vec(eval_bundle(gf, anchor.x0, y, z).grad_x);
            },
            band_cells, "target_image");
    }
    throw Error(ErrorKind::InvalidArgument, "boundary convexity needs check_boundary_convexity");
}

}  // namespace gjet
