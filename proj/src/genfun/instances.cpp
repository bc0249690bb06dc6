#include "gjet/genfun/instances.hpp"

#include "gjet/core/errors.hpp"

#include <cmath>
#include <string>

namespace gjet {

std::pair<double, double> GeneratingFunction::value_dz(std::span<const double> x,
                                                       std::span<const double> y, double z) const
{
    const auto b = derivatives(to_vec(x), to_vec(y), z);
    return {b.value, b.dz};
}

namespace {

void require_dim(int dim)
{
    if (dim < 1 || dim > 3)
        throw Error(ErrorKind::InvalidArgument, "dimension must be 1, 2 or 3");
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

}  // namespace

//---------------------------------------------------------------------------//
// QuadraticCost
//---------------------------------------------------------------------------//

QuadraticCost::QuadraticCost(int dim, double k0) : GeneratingFunction(dim), k0_(k0)
{
    require_dim(dim);
}

double QuadraticCost::value(std::span<const double> x, std::span<const double> y, double z) const
{
    return 0.5 * squared_distance(x, y) - z;
}

std::pair<double, double> QuadraticCost::value_dz(std::span<const double> x,
                                                  std::span<const double> y, double z) const
{
    return {value(x, y, z), -1.0};
}

DerivativeBundle QuadraticCost::derivatives(const Vec& x, const Vec& y, double z) const
{
    const int n = dim();
    const Vec d = x - y;
    DerivativeBundle b;
    b.value = 0.5 * d.squaredNorm() - z;
    b.grad_x = d;
    b.grad_y = -d;
    b.dz = -1.0;
    b.hess_xx = Mat::Identity(n, n);
    b.hess_xy = -Mat::Identity(n, n);
    b.hess_yy = Mat::Identity(n, n);
    b.grad_xz = Vec::Zero(n);
    b.grad_yz = Vec::Zero(n);
    b.dzz = 0.0;
    return b;
}

std::pair<Vec, double> QuadraticCost::forward_yz(const Vec& x, double u, const Vec& p) const
{
    return {x - p, 0.5 * p.squaredNorm() - u};
}

double QuadraticCost::dual_h(std::span<const double> x, std::span<const double> y, double u) const
{
    return 0.5 * squared_distance(x, y) - u;
}

Mat QuadraticCost::matrix_a(const Vec&, double, const Vec&) const
{
    return Mat::Identity(dim(), dim());
}

double QuadraticCost::det_e(const Vec&, const Vec&, double) const
{
    return dim() % 2 == 0 ? 1.0 : -1.0;
}

//---------------------------------------------------------------------------//
// ParallelBeam
//---------------------------------------------------------------------------//

ParallelBeam::ParallelBeam(int dim) : GeneratingFunction(dim)
{
    require_dim(dim);
}

Interval ParallelBeam::z_interval(std::span<const double> x, std::span<const double> y) const
{
    const double r = std::sqrt(squared_distance(x, y));
    return {0.0, r > 0.0 ? 1.0 / r : kInf};
}

double ParallelBeam::value(std::span<const double> x, std::span<const double> y, double z) const
{
    return 0.5 / z - 0.5 * z * squared_distance(x, y);
}

std::pair<double, double> ParallelBeam::value_dz(std::span<const double> x,
                                                 std::span<const double> y, double z) const
{
    const double r2 = squared_distance(x, y);
    return {0.5 / z - 0.5 * z * r2, -0.5 / (z * z) - 0.5 * r2};
}

DerivativeBundle ParallelBeam::derivatives(const Vec& x, const Vec& y, double z) const
{
    const int n = dim();
    const Vec d = x - y;
    const double r2 = d.squaredNorm();
    const Mat id = Mat::Identity(n, n);
    DerivativeBundle b;
    b.value = 0.5 / z - 0.5 * z * r2;
    b.grad_x = -z * d;
    b.grad_y = z * d;
    b.dz = -0.5 / (z * z) - 0.5 * r2;
    b.hess_xx = -z * id;
    b.hess_xy = z * id;
    b.hess_yy = -z * id;
    b.grad_xz = -d;
    b.grad_yz = d;
    b.dzz = 1.0 / (z * z * z);
    return b;
}

std::pair<Vec, double> ParallelBeam::forward_yz(const Vec& x, double u, const Vec& p) const
{
    const double p2 = p.squaredNorm();
    if (!(u > 0.0) || !(p2 < 1.0))
        throw Error(ErrorKind::DomainViolation, "parallel beam requires u > 0 and |p| < 1");
    return {x + (2.0 * u / (1.0 - p2)) * p, (1.0 - p2) / (2.0 * u)};
}

double ParallelBeam::dual_h(std::span<const double> x, std::span<const double> y, double u) const
{
    return 1.0 / (u + std::sqrt(u * u + squared_distance(x, y)));
}

Mat ParallelBeam::matrix_a(const Vec& x, double u, const Vec& p) const
{
    return -forward_yz(x, u, p).second * Mat::Identity(dim(), dim());
}

double ParallelBeam::det_e(const Vec& x, const Vec& y, double z) const
{
    const double t = z * z * (x - y).squaredNorm();
    return std::pow(z, dim()) * (1.0 - t) / (1.0 + t);
}

//---------------------------------------------------------------------------//
// PointSourcePlane
//---------------------------------------------------------------------------//

PointSourcePlane::PointSourcePlane(int dim, double tau) : GeneratingFunction(dim), tau_(tau)
{
    require_dim(dim);
    if (!(tau <= 0.0) || !std::isfinite(tau))
        throw Error(ErrorKind::InvalidArgument, "point source target height must satisfy tau <= 0");
}

bool PointSourcePlane::admissible_pair(std::span<const double> x, std::span<const double>) const
{
    return dot(x, x) < 1.0;
}

double PointSourcePlane::value(std::span<const double> x, std::span<const double> y,
                               double z) const
{
    const double s = std::sqrt(1.0 - dot(x, x));
    const double r = std::sqrt(z + dot(y, y) + tau_ * tau_);
    return (r - dot(x, y) - s * tau_) / z;
}

std::pair<double, double> PointSourcePlane::value_dz(std::span<const double> x,
                                                     std::span<const double> y, double z) const
{
    const double s = std::sqrt(1.0 - dot(x, x));
    const double r = std::sqrt(z + dot(y, y) + tau_ * tau_);
    const double num = r - dot(x, y) - s * tau_;
    return {num / z, 0.5 / (r * z) - num / (z * z)};
}

DerivativeBundle PointSourcePlane::derivatives(const Vec& x, const Vec& y, double z) const
{
    const int n = dim();
    const Mat id = Mat::Identity(n, n);
    const double s = std::sqrt(1.0 - x.squaredNorm());
    const double r = std::sqrt(z + y.squaredNorm() + tau_ * tau_);
    const double num = r - x.dot(y) - s * tau_;
    DerivativeBundle b;
    b.value = num / z;
    b.grad_x = (-y + (tau_ / s) * x) / z;
    b.grad_y = (y / r - x) / z;
    b.dz = 0.5 / (r * z) - num / (z * z);
    b.hess_xx = (tau_ / (s * s * s * z)) * (s * s * id + x * x.transpose());
    b.hess_xy = -id / z;
    b.hess_yy = (id / r - y * y.transpose() / (r * r * r)) / z;
    b.grad_xz = -b.grad_x / z;
    b.grad_yz = -y / (2.0 * r * r * r * z) - (y / r - x) / (z * z);
    b.dzz = -1.0 / (4.0 * r * r * r * z) - 1.0 / (r * z * z) + 2.0 * num / (z * z * z);
    return b;
}

std::pair<Vec, double> PointSourcePlane::forward_yz(const Vec& x, double u, const Vec& p) const
{
    const double x2 = x.squaredNorm();
    if (!(x2 < 1.0))
        throw Error(ErrorKind::DomainViolation, "point source requires |x| < 1");
    const double s = std::sqrt(1.0 - x2);
    const double ubar = u - p.dot(x);
    const double denom = ubar * ubar - p.squaredNorm();
    const double numer = 1.0 - 2.0 * tau_ * u / s;
    if (!(ubar > 0.0) || !(denom > 0.0) || !(numer > 0.0))
        throw Error(ErrorKind::DomainViolation, "point source requires u - p.x > |p|");
    const double z = numer / denom;
    return {-z * p + (tau_ / s) * x, z};
}

double PointSourcePlane::dual_h(std::span<const double> x, std::span<const double> y,
                                double u) const
{
    // G = u  <=>  sqrt(z + |y|^2 + tau^2) = u z + c,  c = x.y + s tau,
    // a quadratic in z with exactly one nonnegative root.
    const double s = std::sqrt(1.0 - dot(x, x));
    const double c = dot(x, y) + s * tau_;
    const double a = u * u;
    const double b = 2.0 * u * c - 1.0;
    const double k = c * c - dot(y, y) - tau_ * tau_;
    const double root = std::sqrt(b * b - 4.0 * a * k);
    const double z = b <= 0.0 ? (-b + root) / (2.0 * a) : -2.0 * k / (b + root);
    if (!(u > 0.0) || !(z > 0.0) || !(u * z + c > 0.0))
        return std::nan("");
    return z;
}

Mat PointSourcePlane::matrix_a(const Vec& x, double u, const Vec& p) const
{
    const auto [y, z] = forward_yz(x, u, p);
    return derivatives(x, y, z).hess_xx;
}

double PointSourcePlane::det_e(const Vec& x, const Vec& y, double z) const
{
    const auto b = derivatives(x, y, z);
    return std::pow(-1.0 / z, dim()) * (1.0 - b.grad_y.dot(b.grad_x) / b.dz);
}

//---------------------------------------------------------------------------//

std::shared_ptr<const GeneratingFunction> make_generating_function(std::string_view kind, int dim,
                                                                   double tau)
{
    if (kind == "quadratic_ot")
        return std::make_shared<QuadraticCost>(dim);
    if (kind == "parallel_beam")
        return std::make_shared<ParallelBeam>(dim);
    if (kind == "point_source")
        return std::make_shared<PointSourcePlane>(dim, tau);
    throw Error(ErrorKind::InvalidArgument, "unknown generating function '" + std::string(kind) + "'");
}

}  // namespace gjet
