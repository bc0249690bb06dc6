#pragma once

#include "gjet/core/grid.hpp"
#include "gjet/genfun/generating_function.hpp"

#include <cstdint>
#include <vector>

namespace gjet {

/// Where and how densely conditions are sampled.
struct SampleSpec
{
    /// Number of (x, y) pairs; each pair yields one point per z fraction.
    int count = 200;
    std::uint64_t seed = 1;
    Box x_region;
    Box y_region;
    /// Relative positions inside I(x, y), all in (0, 1).
    std::vector<double> z_fractions{1.0 / 6, 2.0 / 6, 3.0 / 6, 4.0 / 6, 5.0 / 6};
    /// Length scale used when I(x, y) is unbounded.
    double z_scale = 1.0;
};

struct SamplePoint
{
    Vec x;
    Vec y;
    double z = 0.0;
    double z_fraction = 0.0;
};

/// Maps a fraction q in (0, 1) to a point of the open interval:
/// lo + q (hi - lo) for a bounded interval, lo + s q / (1 - q) on (lo, inf),
/// hi - s (1 - q) / q on (-inf, hi), and s tan(pi (q - 1/2)) on R.
double z_at_fraction(const Interval& iv, double q, double z_scale);

/// Deterministic admissible samples. Pairs (x, y) outside the admissible set
/// are redrawn (at most 1000 times per pair); the result may hold fewer
/// than count * z_fractions.size() points when the region is mostly
/// inadmissible.
std::vector<SamplePoint> draw_samples(const GeneratingFunction& gf, const SampleSpec& spec);

}  // namespace gjet
