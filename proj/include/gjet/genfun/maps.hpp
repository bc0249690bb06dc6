#pragma once

#include "gjet/genfun/generating_function.hpp"

#include <functional>
#include <optional>
#include <span>

namespace gjet {

/// Derivative bundle with admissibility and sign checks.
/// Throws DomainViolation if (x,y) is not admissible or z is outside I(x,y).
DerivativeBundle eval_bundle(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z);

struct RootOptions
{
    double z_tol = 1e-12;
    int max_iter = 60;
};

/// H(x, y, u) together with its derivative relations.
struct DualValue
{
    double z_root = 0.0;
    Vec h_x;
    Vec h_y;
    double h_u = 0.0;
};

/// Solves G(x, y, z) = u for z by bracketed bisection with Newton refinement.
DualValue dual_H(const GeneratingFunction& gf, const Vec& x, const Vec& y, double u,
                 const RootOptions& opts = {});

/// Scalar root of G(x, y, .) = u (numeric path only; no derivative bundle).
double solve_dual_z(const GeneratingFunction& gf, std::span<const double> x,
                    std::span<const double> y, double u, const RootOptions& opts = {});

/// H(x, y, u), using the instance's analytic dual when it has one.
double dual_value(const GeneratingFunction& gf, std::span<const double> x,
                  std::span<const double> y, double u);

struct ForwardOptions
{
    /// Starting point for Newton; takes precedence over the closed form.
    std::optional<std::pair<Vec, double>> guess;
    bool closed_form_guess = true;
    int max_iter = 50;
    double tol = 1e-12;
};

struct ForwardResult
{
    Vec y;
    double z = 0.0;
    int iterations = 0;
};

/// (Y, Z)(x, u, p) from G_x(x,Y,Z) = p, G(x,Y,Z) = u by damped Newton.
ForwardResult forward_YZ(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                         const ForwardOptions& opts = {});

struct EMatrix
{
    Mat e;
    double det = 0.0;
};

/// E = G_xy - G_xz (x) G_y / G_z. Throws SingularE when |det E| < singular_tol.
EMatrix matrix_E(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z,
                 double singular_tol = 1e-12);

/// psi(x, u, p) on the right-hand side of det DY = psi.
using DensityRatio = std::function<double(const Vec& x, double u, const Vec& p)>;
/// Scalar density on source or target space.
using Density = std::function<double(const Vec&)>;

struct ABValue
{
    Mat a;
    double b = 0.0;
};

/// A = G_xx(x, Y, Z) and B = det E(x, Y, Z) psi(x, u, p).
ABValue matrix_A_B(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                   const DensityRatio& psi, const ForwardOptions& opts = {});
Mat matrix_A(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
             const ForwardOptions& opts = {});

/// A from the map Y alone: A = -Y_p^{-1} (Y_x + Y_u (x) p), with Y
/// differentiated by central differences of forward_YZ.
Mat matrix_A_from_map(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p);

/// Y_p by central differences of forward_YZ in p.
Mat jacobian_Y_p(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p);

/// Q = -G_y / G_z.
Vec map_Q(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z);

/// X(y, z, q) solving Q(X, y, z) = q by damped Newton.
Vec map_X(const GeneratingFunction& gf, const Vec& y, double z, const Vec& q,
          const std::optional<Vec>& guess = std::nullopt, int max_iter = 50, double tol = 1e-12);

struct DualABValue
{
    Mat a_star;
    double b_star = 0.0;
    Vec x;  // X(y, z, q)
};

/// A*(y, z, q) = -[(G_y/G_z)_y + (G_y/G_z)_z (x) q] at X(y, z, q), and
/// B* = (-1/G_z)^n |det E| g(y) / f(X).
DualABValue dual_Astar_Bstar(const GeneratingFunction& gf, const Vec& y, double z, const Vec& q,
                             const Density& f, const Density& g,
                             const std::optional<Vec>& guess = std::nullopt);

}  // namespace gjet
