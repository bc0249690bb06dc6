#pragma once

#include "gjet/core/types.hpp"

#include <vector>

namespace gjet::geometry {

struct Point2
{
    double x;
    double y;
};

/// Convex hull (counter-clockwise, no collinear points) by monotone chain.
std::vector<Point2> convex_hull(std::vector<Point2> points);

double polygon_area(const std::vector<Point2>& polygon);
double polygon_perimeter(const std::vector<Point2>& polygon);

/// Signed distance to a convex CCW polygon: negative inside, positive outside.
double signed_distance_convex(const std::vector<Point2>& hull, Point2 p);

/// Result of comparing a rasterized image set with its convex hull.
struct HullComparison
{
    double image_measure = 0.0;
    double hull_measure = 0.0;
    double ratio = 0.0;
    double threshold = 0.0;  // ratio must be >= threshold to pass
    bool convex = false;
};

/// Convexity of the image of a union of grid cells under a map.
///
/// `cells` lists the mapped corners of each cell (2 per cell in 1-D, 4 in
/// 2-D ordered around the cell). The image measure is the sum of the
/// mapped-cell measures; the hull is taken over all mapped corners. The
/// deficit hull - image may not exceed a band `band_cells` mapped cells wide
/// along the hull boundary.
HullComparison compare_with_hull(int dim, const std::vector<std::vector<Vec>>& cells,
                                 double band_cells);

/// Distance of y outside the convex hull of `points` (0 when inside).
/// Supports dimensions 1 and 2.
double distance_outside_hull(const std::vector<Vec>& points, const Vec& y);

}  // namespace gjet::geometry
