#pragma once

#include "gjet/core/grid.hpp"
#include "gjet/genfun/maps.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace gjet {

/// Values of a function at the cell centres of a grid.
struct GridFunction
{
    SourceGrid grid;
    std::vector<double> values;

    static GridFunction sample(const SourceGrid& grid, const std::function<double(const Vec&)>& fn);
};

/// Central-difference value, gradient and Hessian at one node.
struct NodeJet
{
    double u = 0.0;
    Vec du;
    Mat d2u;
};

/// Requires a one-node margin around `cell`.
NodeJet node_jet(const GridFunction& fn, std::size_t cell);

/// Per-node field. Nodes inside the margin are not evaluated; nodes whose
/// evaluation raised a library error are counted in `masked`.
struct ResidualField
{
    std::vector<double> values;
    std::vector<char> valid;
    std::size_t evaluated = 0;
    std::size_t masked = 0;
    double max_abs = 0.0;
};

/// psi = f / (g o Y) sign(det E), so that B = det E psi = |det E| f / (g o Y).
DensityRatio density_ratio(const GeneratingFunction& gf, const Density& f, const Density& g);

/// det[D^2u - A(x,u,Du)] - B(x,u,Du) with B = det E psi.
ResidualField ma_residual(const GeneratingFunction& gf, const GridFunction& u,
                          const DensityRatio& psi);

/// det DT - psi with T(x) = Y(x, u, Du) differenced on the grid. Uses a
/// two-node margin.
ResidualField pje_residual(const GeneratingFunction& gf, const GridFunction& u,
                           const DensityRatio& psi);

struct EllipticityResult
{
    /// Smallest eigenvalue of the symmetrized D^2u - A per node.
    ResidualField min_eigenvalue;
    double min_value = kInf;
    bool admissible = false;
};

EllipticityResult ellipticity_check(const GeneratingFunction& gf, const GridFunction& u,
                                    double ellip_tol = 1e-6);

/// det[D^2v - A*(y,v,Dv)] - B*(y,v,Dv) for v sampled on a target grid.
ResidualField dual_residual(const GeneratingFunction& gf, const GridFunction& v, const Density& f,
                            const Density& g);

}  // namespace gjet
