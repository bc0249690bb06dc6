#include "gjet/conditions/sampling.hpp"

#include "gjet/core/errors.hpp"
#include "gjet/core/random.hpp"

#include <cmath>
#include <numbers>

namespace gjet {

double z_at_fraction(const Interval& iv, double q, double z_scale)
{
    const bool lo = std::isfinite(iv.lo);
    const bool hi = std::isfinite(iv.hi);
    if (lo && hi)
        return iv.lo + q * (iv.hi - iv.lo);
    if (lo)
        return iv.lo + z_scale * q / (1.0 - q);
    if (hi)
        return iv.hi - z_scale * (1.0 - q) / q;
    return z_scale * std::tan(std::numbers::pi * (q - 0.5));
}

namespace {

Vec draw_in_box(Rng& rng, const Box& box)
{
    Vec v(box.dim());
    for (int i = 0; i < box.dim(); ++i)
        v[i] = rng.uniform(box.lo[i], box.hi[i]);
    return v;
}

}  // namespace

std::vector<SamplePoint> draw_samples(const GeneratingFunction& gf, const SampleSpec& spec)
{
    const int n = gf.dim();
    if (spec.x_region.dim() != n || spec.y_region.dim() != n)
        throw Error(ErrorKind::InvalidArgument, "sample regions must match the dimension");
    for (double q : spec.z_fractions)
        if (!(q > 0.0 && q < 1.0))
            throw Error(ErrorKind::InvalidArgument, "z fractions must lie in (0, 1)");

    Rng rng(spec.seed);
    std::vector<SamplePoint> out;
    out.reserve(static_cast<std::size_t>(spec.count) * spec.z_fractions.size());
    for (int i = 0; i < spec.count; ++i) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Vec x = draw_in_box(rng, spec.x_region);
            Vec y = draw_in_box(rng, spec.y_region);
            if (!gf.admissible_pair(view(x), view(y)))
                continue;
            const Interval iv = gf.z_interval(view(x), view(y));
            if (iv.empty())
                continue;
            for (double q : spec.z_fractions) {
                const double z = z_at_fraction(iv, q, spec.z_scale);
                if (iv.contains(z))
                    out.push_back({x, y, z, q});
            }
            break;
        }
    }
    return out;
}

}  // namespace gjet
