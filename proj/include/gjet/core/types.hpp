#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <span>

namespace gjet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open interval (lo, hi); either end may be infinite.
struct Interval
{
    double lo = -kInf;
    double hi = kInf;

    bool contains(double v) const noexcept { return lo < v && v < hi; }
    bool empty() const noexcept { return !(lo < hi); }
};

inline std::span<const double> view(const Vec& v) noexcept
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline Vec to_vec(std::span<const double> s)
{
    Vec v(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = s[i];
    return v;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace gjet
