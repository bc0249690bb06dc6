#pragma once

#include "gjet/core/types.hpp"

#include <cstdint>
#include <random>

namespace gjet {

/// Seeded generator whose outputs do not depend on the standard library's
/// distribution implementations (mt19937_64 itself is fully specified).
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniformly distributed direction on the unit sphere (rejection in the cube).
    Vec unit_vector(int dim)
    {
        Vec v(dim);
        for (;;) {
            for (int i = 0; i < dim; ++i)
                v[i] = uniform(-1.0, 1.0);
            const double n2 = v.squaredNorm();
            if (n2 > 1e-6 && n2 <= 1.0)
                return v / std::sqrt(n2);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace gjet
