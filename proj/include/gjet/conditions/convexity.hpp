#pragma once

#include "gjet/conditions/report.hpp"
#include "gjet/core/grid.hpp"
#include "gjet/genfun/generating_function.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gjet {

struct Ball
{
    Vec center;
    double radius = 1.0;
};

/// Rasterized region: the cells of `grid` with a nonzero mask entry.
struct RasterRegion
{
    SourceGrid grid;
    std::vector<char> mask;
};

/// Annulus r_in <= |x - c| <= r_out rasterized on a grid (cell centres).
RasterRegion rasterize_annulus(const SourceGrid& grid, const Vec& center, double r_in, double r_out);
RasterRegion rasterize_ball(const SourceGrid& grid, const Ball& ball);

enum class ConvexityKind { SourceBoundary, SourceImage, TargetImage };

/// Anchor of the convexity notions: (y0, z0) for the source kinds and
/// (x0, u0) for the target image.
struct ConvexityAnchor
{
    Vec y0;
    double z0 = 0.0;
    Vec x0;
    double u0 = 0.0;
};

/// Hull-ratio convexity of a mapped region. Every cell corner is mapped;
/// band_cells is the allowed boundary deficit in mapped cell widths.
ConditionRecord mapped_region_convexity(const RasterRegion& region,
                                        const std::function<Vec(const Vec&)>& map,
                                        double band_cells, const std::string& name);

/// Boundary criterion for a ball:
///   [D_i gamma_j - D_{p_k} A_ij gamma_k] tau_i tau_j >= -weak_tol
/// at `samples` boundary points, with gamma the outer normal and tau unit tangent.
ConditionRecord check_boundary_convexity(const GeneratingFunction& gf, const Ball& omega,
                                         const ConvexityAnchor& anchor, int samples,
                                         std::uint64_t seed, double weak_tol = 1e-6);

/// Source image Q(., y0, z0)(region) or target image
/// G_x(x0, ., H(x0, ., u0))(region), tested by hull ratio.
ConditionRecord check_image_convexity(const GeneratingFunction& gf, ConvexityKind kind,
                                      const RasterRegion& region, const ConvexityAnchor& anchor,
                                      double band_cells = 2.0);

}  // namespace gjet
