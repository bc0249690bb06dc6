#pragma once

#include <algorithm>
#include <cmath>

namespace gjet::fd {

/// Step for first-order central differences at a coordinate of magnitude |v|.
inline double step(double v) noexcept
{
    return std::max(1e-5, 1e-5 * std::abs(v));
}

/// Step for second central differences; larger than step() since roundoff
/// enters as eps/h^2 rather than eps/h.
inline double step2(double v) noexcept
{
    return std::max(1e-4, 1e-4 * std::abs(v));
}

}  // namespace gjet::fd
