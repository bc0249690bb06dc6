#pragma once

#include "gjet/core/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>

namespace gjet {

/// Value and exact partial derivatives of G at one point (x, y, z).
/// Matrix entries follow (row = first variable, column = second), so
/// hess_xy(i, j) = d^2 G / dx_i dy_j.
struct DerivativeBundle
{
    double value = 0.0;
    Vec grad_x;
    Vec grad_y;
    double dz = 0.0;
    Mat hess_xx;
    Mat hess_xy;
    Mat hess_yy;
    Vec grad_xz;
    Vec grad_yz;
    double dzz = 0.0;
};

/// Constants of the gradient bound |G_x| <= k0 where G > m0.
struct G5Constants
{
    double m0 = -kInf;
    double k0 = kInf;
};

/// Analytic expressions available for the built-in generating functions.
/// They serve as initial guesses and as independent test oracles.
class ClosedForms
{
  public:
    virtual ~ClosedForms() = default;

    /// (Y, Z) solving G_x(x,Y,Z) = p, G(x,Y,Z) = u.
    virtual std::pair<Vec, double> forward_yz(const Vec& x, double u, const Vec& p) const = 0;
    /// z with G(x,y,z) = u.
    virtual double dual_h(std::span<const double> x, std::span<const double> y, double u) const = 0;
    /// A(x,u,p) = G_xx(x, Y, Z).
    virtual Mat matrix_a(const Vec& x, double u, const Vec& p) const = 0;
    virtual double det_e(const Vec& x, const Vec& y, double z) const = 0;
};

/// A generating function G(x, y, z), strictly decreasing in z on its
/// admissible set. Implementations are immutable and thread-safe.
class GeneratingFunction
{
  public:
    explicit GeneratingFunction(int dim) : dim_(dim) {}
    virtual ~GeneratingFunction() = default;

    int dim() const noexcept { return dim_; }
    virtual std::string name() const = 0;

    /// Membership of (x, y) in the admissible set U.
    virtual bool admissible_pair(std::span<const double> x, std::span<const double> y) const = 0;
    /// The interval I(x, y) of admissible z.
    virtual Interval z_interval(std::span<const double> x, std::span<const double> y) const = 0;
    /// The range J(x, y) = G(x, y, I(x, y)).
    virtual Interval u_interval(std::span<const double> x, std::span<const double> y) const = 0;

    virtual double value(std::span<const double> x, std::span<const double> y, double z) const = 0;
    /// (G, G_z); cheaper than derivatives() for scalar root finding.
    virtual std::pair<double, double> value_dz(std::span<const double> x,
                                               std::span<const double> y, double z) const;
    /// All first and second derivatives. No admissibility check.
    virtual DerivativeBundle derivatives(const Vec& x, const Vec& y, double z) const = 0;

    virtual std::optional<G5Constants> g5() const { return std::nullopt; }
    virtual const ClosedForms* closed_forms() const { return nullptr; }

  private:
    int dim_;
};

}  // namespace gjet
