#include "gjet/madiag/residuals.hpp"

#include "gjet/core/errors.hpp"
#include "gjet/core/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace gjet {

GridFunction GridFunction::sample(const SourceGrid& grid,
                                  const std::function<double(const Vec&)>& fn)
{
    GridFunction out{grid, std::vector<double>(grid.cell_count())};
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        out.values[c] = fn(grid.center(c));
        if (!std::isfinite(out.values[c]))
            throw Error(ErrorKind::InvalidArgument, "grid function is not finite");
    }
    return out;
}

NodeJet node_jet(const GridFunction& fn, std::size_t cell)
{
    const auto& grid = fn.grid;
    const int n = grid.dim();
    const auto& v = fn.values;
    NodeJet jet;
    jet.u = v[cell];
    jet.du.resize(n);
    jet.d2u.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const double hi = grid.spacing(i);
        const auto ip = static_cast<std::size_t>(grid.neighbor(cell, i, 1));
        const auto im = static_cast<std::size_t>(grid.neighbor(cell, i, -1));
        jet.du[i] = (v[ip] - v[im]) / (2.0 * hi);
        jet.d2u(i, i) = (v[ip] - 2.0 * v[cell] + v[im]) / (hi * hi);
        for (int j = i + 1; j < n; ++j) {
            const double hj = grid.spacing(j);
            auto corner = [&](std::size_t base, int off) {
                return v[static_cast<std::size_t>(grid.neighbor(base, j, off))];
            };
            const double m = (corner(ip, 1) - corner(ip, -1) - corner(im, 1) + corner(im, -1)) /
                             (4.0 * hi * hj);
            jet.d2u(i, j) = m;
            jet.d2u(j, i) = m;
        }
    }
    return jet;
}

namespace {

// Evaluates `node(cell, x)` at every node with the given margin. Library
// errors mask the node.
template <class F>
ResidualField nodewise(const SourceGrid& grid, int margin, F node)
{
    const std::size_t cells = grid.cell_count();
    ResidualField out;
    out.values.assign(cells, std::nan(""));
    out.valid.assign(cells, 0);
    std::vector<char> masked(cells, 0);
    parallel_for(cells, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            if (!grid.is_interior(c, margin))
                continue;
            try {
                const double r = node(c, grid.center(c));
                if (std::isfinite(r)) {
                    out.values[c] = r;
                    out.valid[c] = 1;
                } else {
                    masked[c] = 1;
                }
            } catch (const Error&) {
                masked[c] = 1;
            }
        }
    });
    for (std::size_t c = 0; c < cells; ++c) {
        if (out.valid[c]) {
            ++out.evaluated;
            out.max_abs = std::max(out.max_abs, std::abs(out.values[c]));
        }
        out.masked += static_cast<std::size_t>(masked[c]);
    }
    return out;
}

}  // namespace

DensityRatio density_ratio(const GeneratingFunction& gf, const Density& f, const Density& g)
{
    return [&gf, f, g](const Vec& x, double u, const Vec& p) {
        const auto yz = forward_YZ(gf, x, u, p);
        const double det = matrix_E(gf, x, yz.y, yz.z, 0.0).det;
        const double sign = det > 0.0 ? 1.0 : (det < 0.0 ? -1.0 : 0.0);
        return (f ? f(x) : 1.0) / (g ? g(yz.y) : 1.0) * sign;
    };
}

ResidualField ma_residual(const GeneratingFunction& gf, const GridFunction& u,
                          const DensityRatio& psi)
{
    return nodewise(u.grid, 1, [&](std::size_t c, const Vec& x) {
        const auto jet = node_jet(u, c);
        const auto ab = matrix_A_B(gf, x, jet.u, jet.du, psi);
        return (jet.d2u - ab.a).determinant() - ab.b;
    });
}

ResidualField pje_residual(const GeneratingFunction& gf, const GridFunction& u,
                           const DensityRatio& psi)
{
    const auto& grid = u.grid;
    const int n = grid.dim();
    const std::size_t cells = grid.cell_count();
    // T on the one-margin interior, NaN where it is unavailable.
    std::vector<Vec> t(cells);
    parallel_for(cells, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            if (!grid.is_interior(c, 1))
                continue;
            const auto jet = node_jet(u, c);
            try {
                t[c] = forward_YZ(gf, grid.center(c), jet.u, jet.du).y;
            } catch (const Error&) {
                t[c] = Vec::Constant(n, std::nan(""));
            }
        }
    });
    return nodewise(grid, 2, [&](std::size_t c, const Vec& x) {
        Mat dt(n, n);
        for (int j = 0; j < n; ++j) {
            const auto& tp = t[static_cast<std::size_t>(grid.neighbor(c, j, 1))];
            const auto& tm = t[static_cast<std::size_t>(grid.neighbor(c, j, -1))];
            dt.col(j) = (tp - tm) / (2.0 * grid.spacing(j));
        }
        const auto jet = node_jet(u, c);
        return dt.determinant() - psi(x, jet.u, jet.du);
    });
}

EllipticityResult ellipticity_check(const GeneratingFunction& gf, const GridFunction& u,
                                    double ellip_tol)
{
    EllipticityResult out;
    out.min_eigenvalue = nodewise(u.grid, 1, [&](std::size_t c, const Vec& x) {
        const auto jet = node_jet(u, c);
        const Mat m = jet.d2u - matrix_A(gf, x, jet.u, jet.du);
        const Mat sym = 0.5 * (m + m.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    });
    const auto& f = out.min_eigenvalue;
    for (std::size_t c = 0; c < f.values.size(); ++c)
        if (f.valid[c])
            out.min_value = std::min(out.min_value, f.values[c]);
    out.admissible = f.evaluated > 0 && out.min_value >= -ellip_tol;
    return out;
}

ResidualField dual_residual(const GeneratingFunction& gf, const GridFunction& v, const Density& f,
                            const Density& g)
{
    return nodewise(v.grid, 1, [&](std::size_t c, const Vec& y) {
        const auto jet = node_jet(v, c);
        const auto ab = dual_Astar_Bstar(gf, y, jet.u, jet.du, f, g);
        return (jet.d2u - ab.a_star).determinant() - ab.b_star;
    });
}

}  // namespace gjet
