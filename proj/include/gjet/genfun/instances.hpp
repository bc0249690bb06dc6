#pragma once

#include "gjet/genfun/generating_function.hpp"

#include <memory>
#include <string_view>

namespace gjet {

/// Quadratic transport cost G = |x - y|^2 / 2 - z on R^n x R^n, I = R.
class QuadraticCost final : public GeneratingFunction, public ClosedForms
{
  public:
    /// `k0` bounds |G_x| = |x - y| on the intended domains (infinite if unknown).
    explicit QuadraticCost(int dim, double k0 = kInf);

    std::string name() const override { return "quadratic_ot"; }
    bool admissible_pair(std::span<const double>, std::span<const double>) const override
    {
        return true;
    }
    Interval z_interval(std::span<const double>, std::span<const double>) const override
    {
        return {-kInf, kInf};
    }
    Interval u_interval(std::span<const double>, std::span<const double>) const override
    {
        return {-kInf, kInf};
    }
    double value(std::span<const double> x, std::span<const double> y, double z) const override;
    std::pair<double, double> value_dz(std::span<const double> x, std::span<const double> y,
                                       double z) const override;
    DerivativeBundle derivatives(const Vec& x, const Vec& y, double z) const override;
    std::optional<G5Constants> g5() const override { return G5Constants{-kInf, k0_}; }
    const ClosedForms* closed_forms() const override { return this; }

    std::pair<Vec, double> forward_yz(const Vec& x, double u, const Vec& p) const override;
    double dual_h(std::span<const double> x, std::span<const double> y, double u) const override;
    Mat matrix_a(const Vec& x, double u, const Vec& p) const override;
    double det_e(const Vec& x, const Vec& y, double z) const override;

  private:
    double k0_;
};

/// Parallel-beam reflector G = 1/(2z) - (z/2)|x - y|^2, I(x,y) = (0, 1/|x - y|).
class ParallelBeam final : public GeneratingFunction, public ClosedForms
{
  public:
    explicit ParallelBeam(int dim);

    std::string name() const override { return "parallel_beam"; }
    bool admissible_pair(std::span<const double>, std::span<const double>) const override
    {
        return true;
    }
    Interval z_interval(std::span<const double> x, std::span<const double> y) const override;
    Interval u_interval(std::span<const double>, std::span<const double>) const override
    {
        return {0.0, kInf};
    }
    double value(std::span<const double> x, std::span<const double> y, double z) const override;
    std::pair<double, double> value_dz(std::span<const double> x, std::span<const double> y,
                                       double z) const override;
    DerivativeBundle derivatives(const Vec& x, const Vec& y, double z) const override;
    std::optional<G5Constants> g5() const override { return G5Constants{0.0, 1.0}; }
    const ClosedForms* closed_forms() const override { return this; }

    std::pair<Vec, double> forward_yz(const Vec& x, double u, const Vec& p) const override;
    double dual_h(std::span<const double> x, std::span<const double> y, double u) const override;
    Mat matrix_a(const Vec& x, double u, const Vec& p) const override;
    double det_e(const Vec& x, const Vec& y, double z) const override;
};

/// Point source reflecting onto the hyperplane at height tau <= 0:
///   G = (1/z) { sqrt(z + |y|^2 + tau^2) - x.y - sqrt(1 - |x|^2) tau },
/// with x in the open unit ball and I = (0, inf).
class PointSourcePlane final : public GeneratingFunction, public ClosedForms
{
  public:
    PointSourcePlane(int dim, double tau);

    double tau() const noexcept { return tau_; }

    std::string name() const override { return "point_source"; }
    bool admissible_pair(std::span<const double> x, std::span<const double> y) const override;
    Interval z_interval(std::span<const double>, std::span<const double>) const override
    {
        return {0.0, kInf};
    }
    Interval u_interval(std::span<const double>, std::span<const double>) const override
    {
        return {0.0, kInf};
    }
    double value(std::span<const double> x, std::span<const double> y, double z) const override;
    std::pair<double, double> value_dz(std::span<const double> x, std::span<const double> y,
                                       double z) const override;
    DerivativeBundle derivatives(const Vec& x, const Vec& y, double z) const override;
    const ClosedForms* closed_forms() const override { return this; }

    std::pair<Vec, double> forward_yz(const Vec& x, double u, const Vec& p) const override;
    double dual_h(std::span<const double> x, std::span<const double> y, double u) const override;
    Mat matrix_a(const Vec& x, double u, const Vec& p) const override;
    double det_e(const Vec& x, const Vec& y, double z) const override;

  private:
    double tau_;
};

/// Builds a built-in instance from its configuration name
/// ("quadratic_ot", "parallel_beam", "point_source").
std::shared_ptr<const GeneratingFunction> make_generating_function(std::string_view kind, int dim,
                                                                   double tau = 0.0);

}  // namespace gjet
