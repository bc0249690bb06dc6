#include "gjet/core/geometry.hpp"

#include "gjet/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gjet::geometry {

namespace {

double cross(Point2 o, Point2 a, Point2 b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double segment_distance(Point2 a, Point2 b, Point2 p)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

std::vector<Point2> convex_hull(std::vector<Point2> pts)
{
    std::sort(pts.begin(), pts.end(),
              [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3)
        return pts;
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0)
            --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double polygon_area(const std::vector<Point2>& poly)
{
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

double polygon_perimeter(const std::vector<Point2>& poly)
{
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        s += std::hypot(q.x - p.x, q.y - p.y);
    }
    return s;
}

double signed_distance_convex(const std::vector<Point2>& hull, Point2 p)
{
    if (hull.empty())
        return kInf;
    if (hull.size() == 1)
        return std::hypot(p.x - hull[0].x, p.y - hull[0].y);
    bool inside = hull.size() >= 3;
    double dist = kInf;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        if (cross(a, b, p) < 0)
            inside = false;
        dist = std::min(dist, segment_distance(a, b, p));
    }
    return inside ? -dist : dist;
}

HullComparison compare_with_hull(int dim, const std::vector<std::vector<Vec>>& cells,
                                 double band_cells)
{
    HullComparison out;
    if (cells.empty())
        return out;
    if (dim == 1) {
        double lo = kInf, hi = -kInf;
        for (const auto& c : cells) {
            out.image_measure += std::abs(c.at(1)[0] - c.at(0)[0]);
            for (const auto& v : c) {
                lo = std::min(lo, v[0]);
                hi = std::max(hi, v[0]);
            }
        }
        out.hull_measure = hi - lo;
        const double width = out.image_measure / static_cast<double>(cells.size());
        const double allowed = band_cells * width * 2.0;
        out.ratio = out.hull_measure > 0 ? out.image_measure / out.hull_measure : 1.0;
        out.threshold = out.hull_measure > 0 ? 1.0 - allowed / out.hull_measure : 1.0;
    } else if (dim == 2) {
        std::vector<Point2> corners;
        corners.reserve(cells.size() * 4);
        for (const auto& c : cells) {
            std::vector<Point2> quad;
            for (const auto& v : c) {
                quad.push_back({v[0], v[1]});
                corners.push_back({v[0], v[1]});
            }
            out.image_measure += std::abs(polygon_area(quad));
        }
        const auto hull = convex_hull(std::move(corners));
        out.hull_measure = hull.size() >= 3 ? polygon_area(hull) : 0.0;
        const double width = std::sqrt(out.image_measure / static_cast<double>(cells.size()));
        const double allowed = band_cells * width * polygon_perimeter(hull);
        out.ratio = out.hull_measure > 0 ? out.image_measure / out.hull_measure : 1.0;
        out.threshold = out.hull_measure > 0 ? 1.0 - allowed / out.hull_measure : 1.0;
    } else {
        throw Error(ErrorKind::UnsupportedGeometry, "hull comparison supports dimensions 1 and 2");
    }
    out.convex = out.ratio >= out.threshold;
    return out;
}

double distance_outside_hull(const std::vector<Vec>& points, const Vec& y)
{
    if (points.empty())
        return kInf;
    const auto n = y.size();
    if (n == 1) {
        double lo = kInf, hi = -kInf;
        for (const auto& p : points) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        return std::max({0.0, lo - y[0], y[0] - hi});
    }
    if (n != 2)
        throw Error(ErrorKind::UnsupportedGeometry, "hull membership supports dimensions 1 and 2");
    std::vector<Point2> pts;
    for (const auto& p : points)
        pts.push_back({p[0], p[1]});
    const auto hull = convex_hull(std::move(pts));
    return std::max(0.0, signed_distance_convex(hull, {y[0], y[1]}));
}

}  // namespace gjet::geometry
