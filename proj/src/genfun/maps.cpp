#include "gjet/genfun/maps.hpp"

#include "gjet/core/errors.hpp"
#include "gjet/core/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gjet {

namespace {

// A finite point inside an open interval, used to seed bracketing and Newton.
double interior_point(const Interval& iv)
{
    if (std::isfinite(iv.lo) && std::isfinite(iv.hi))
        return 0.5 * (iv.lo + iv.hi);
    if (std::isfinite(iv.lo))
        return iv.lo + std::max(1.0, std::abs(iv.lo));
    if (std::isfinite(iv.hi))
        return iv.hi - std::max(1.0, std::abs(iv.hi));
    return 0.0;
}

bool in_domain(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z)
{
    return y.allFinite() && std::isfinite(z) && gf.admissible_pair(view(x), view(y)) &&
           gf.z_interval(view(x), view(y)).contains(z);
}

}  // namespace

DerivativeBundle eval_bundle(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z)
{
    if (x.size() != gf.dim() || y.size() != gf.dim())
        throw Error(ErrorKind::InvalidArgument, "point dimension does not match generating function");
    if (!gf.admissible_pair(view(x), view(y)))
        throw Error(ErrorKind::DomainViolation, "(x, y) is not an admissible pair");
    if (!gf.z_interval(view(x), view(y)).contains(z))
        throw Error(ErrorKind::DomainViolation, "z = " + std::to_string(z) + " outside I(x, y)");
    auto b = gf.derivatives(x, y, z);
    if (!(b.dz < 0.0))
        throw Error(ErrorKind::DomainViolation, "G_z is not negative at an admissible point");
    return b;
}

//---------------------------------------------------------------------------//
// Dual function H
//---------------------------------------------------------------------------//

double solve_dual_z(const GeneratingFunction& gf, std::span<const double> x,
                    std::span<const double> y, double u, const RootOptions& opts)
{
    if (!gf.admissible_pair(x, y))
        throw Error(ErrorKind::DomainViolation, "(x, y) is not an admissible pair");
    if (!gf.u_interval(x, y).contains(u))
        throw Error(ErrorKind::RangeViolation, "u = " + std::to_string(u) + " outside J(x, y)");

    const Interval iv = gf.z_interval(x, y);
    const double mid = interior_point(iv);
    auto f = [&](double z) { return gf.value(x, y, z) - u; };

    // G is decreasing in z: need f(a) > 0 > f(b).
    double a = mid, b = mid;
    double fa = f(a), fb = fa;
    for (int k = 1; fa <= 0.0; ++k) {
        if (k > 200)
            throw Error(ErrorKind::NoRoot, "cannot bracket G = u from below");
        b = a;
        fb = fa;
        a = std::isfinite(iv.lo) ? iv.lo + (mid - iv.lo) * std::ldexp(1.0, -k)
                                 : mid - std::ldexp(1.0, k);
        fa = f(a);
    }
    for (int k = 1; fb >= 0.0; ++k) {
        if (k > 200)
            throw Error(ErrorKind::NoRoot, "cannot bracket G = u from above");
        if (fb > 0.0) {
            a = b;
            fa = fb;
        }
        b = std::isfinite(iv.hi) ? iv.hi - (iv.hi - mid) * std::ldexp(1.0, -k)
                                 : mid + std::ldexp(1.0, k);
        fb = f(b);
    }
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;

    // Newton from the bracket, falling back to bisection whenever the step
    // leaves it. The bracket shrinks every iteration.
    double z = 0.5 * (a + b);
    for (int it = 0; it < opts.max_iter; ++it) {
        const auto [g, gz] = gf.value_dz(x, y, z);
        const double r = g - u;
        if (r == 0.0)
            return z;
        if (r > 0.0)
            a = z;
        else
            b = z;
        double next = z - r / gz;
        if (!(next > a && next < b))
            next = 0.5 * (a + b);
        const double tol = opts.z_tol * std::max(1.0, std::abs(z));
        if (std::abs(next - z) <= tol || b - a <= tol)
            return next;
        z = next;
    }
    return z;
}

DualValue dual_H(const GeneratingFunction& gf, const Vec& x, const Vec& y, double u,
                 const RootOptions& opts)
{
    DualValue out;
    out.z_root = solve_dual_z(gf, view(x), view(y), u, opts);
    const auto b = eval_bundle(gf, x, y, out.z_root);
    out.h_x = -b.grad_x / b.dz;
    out.h_y = -b.grad_y / b.dz;
    out.h_u = 1.0 / b.dz;
    return out;
}

double dual_value(const GeneratingFunction& gf, std::span<const double> x,
                  std::span<const double> y, double u)
{
    if (const auto* cf = gf.closed_forms()) {
        if (gf.admissible_pair(x, y) && gf.u_interval(x, y).contains(u)) {
            const double z = cf->dual_h(x, y, u);
            if (gf.z_interval(x, y).contains(z))
                return z;
        }
    }
    return solve_dual_z(gf, x, y, u);
}

//---------------------------------------------------------------------------//
// Forward map (Y, Z)
//---------------------------------------------------------------------------//

ForwardResult forward_YZ(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                         const ForwardOptions& opts)
{
    const int n = gf.dim();
    ForwardResult res;
    bool seeded = false;
    if (opts.guess) {
        res.y = opts.guess->first;
        res.z = opts.guess->second;
        seeded = true;
    } else if (opts.closed_form_guess && gf.closed_forms()) {
        try {
            std::tie(res.y, res.z) = gf.closed_forms()->forward_yz(x, u, p);
            seeded = in_domain(gf, x, res.y, res.z);
        } catch (const Error&) {
            seeded = false;
        }
    }
    if (!seeded) {
        res.y = x;
        res.z = interior_point(gf.z_interval(view(x), view(x)));
    }
    if (!in_domain(gf, x, res.y, res.z))
        throw Error(ErrorKind::DomainViolation, "initial guess for (Y, Z) is not admissible");

    const double scale = 1.0 + std::abs(u) + p.lpNorm<Eigen::Infinity>();
    auto residual = [&](const DerivativeBundle& b) {
        Vec r(n + 1);
        r.head(n) = b.grad_x - p;
        r[n] = b.value - u;
        return r;
    };

    DerivativeBundle b = gf.derivatives(x, res.y, res.z);
    Vec r = residual(b);
    double rnorm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < opts.max_iter; ++it) {
        if (rnorm <= opts.tol * scale) {
            res.iterations = it;
            return res;
        }
        Mat jac(n + 1, n + 1);
        jac.topLeftCorner(n, n) = b.hess_xy;
        jac.topRightCorner(n, 1) = b.grad_xz;
        jac.bottomLeftCorner(1, n) = b.grad_y.transpose();
        jac(n, n) = b.dz;
        const Eigen::PartialPivLU<Mat> lu(jac);
        const Vec step = lu.solve(-r);
        if (!step.allFinite())
            throw Error(ErrorKind::NoConvergence, "singular Jacobian in forward Newton");

        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half, lambda *= 0.5) {
            const Vec y_new = res.y + lambda * step.head(n);
            const double z_new = res.z + lambda * step[n];
            if (!in_domain(gf, x, y_new, z_new))
                continue;
            const auto b_new = gf.derivatives(x, y_new, z_new);
            const Vec r_new = residual(b_new);
            const double n_new = r_new.lpNorm<Eigen::Infinity>();
            if (n_new < rnorm || (half == 0 && n_new <= opts.tol * scale)) {
                res.y = y_new;
                res.z = z_new;
                b = b_new;
                r = r_new;
                rnorm = n_new;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (rnorm <= 1e3 * opts.tol * scale) {
                res.iterations = it;
                return res;
            }
            throw Error(ErrorKind::DomainViolation, "forward Newton cannot decrease the residual");
        }
    }
    if (rnorm <= opts.tol * scale) {
        res.iterations = opts.max_iter;
        return res;
    }
    throw Error(ErrorKind::NoConvergence, "forward Newton did not converge");
}

//---------------------------------------------------------------------------//
// E, A, B
//---------------------------------------------------------------------------//

EMatrix matrix_E(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z,
                 double singular_tol)
{
    const auto b = eval_bundle(gf, x, y, z);
    EMatrix out;
    out.e = b.hess_xy - b.grad_xz * b.grad_y.transpose() / b.dz;
    out.det = out.e.determinant();
    if (!(std::abs(out.det) >= singular_tol))
        throw Error(ErrorKind::SingularE, "det E = " + std::to_string(out.det));
    return out;
}

ABValue matrix_A_B(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                   const DensityRatio& psi, const ForwardOptions& opts)
{
    const auto fw = forward_YZ(gf, x, u, p, opts);
    const auto b = eval_bundle(gf, x, fw.y, fw.z);
    const Mat e = b.hess_xy - b.grad_xz * b.grad_y.transpose() / b.dz;
    return {b.hess_xx, e.determinant() * (psi ? psi(x, u, p) : 1.0)};
}

Mat matrix_A(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
             const ForwardOptions& opts)
{
    const auto fw = forward_YZ(gf, x, u, p, opts);
    return eval_bundle(gf, x, fw.y, fw.z).hess_xx;
}

namespace {

// forward_YZ for difference stencils: closed form seed when available,
// otherwise warm start from the stencil centre.
Vec stencil_Y(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
              const ForwardResult& centre)
{
    ForwardOptions opts;
    if (!gf.closed_forms())
        opts.guess = std::make_pair(centre.y, centre.z);
    return forward_YZ(gf, x, u, p, opts).y;
}

}  // namespace

Mat jacobian_Y_p(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p)
{
    const int n = gf.dim();
    const auto centre = forward_YZ(gf, x, u, p);
    Mat yp(n, n);
    for (int k = 0; k < n; ++k) {
        const double h = fd::step(p[k]);
        Vec pp = p, pm = p;
        pp[k] += h;
        pm[k] -= h;
        yp.col(k) = (stencil_Y(gf, x, u, pp, centre) - stencil_Y(gf, x, u, pm, centre)) / (2.0 * h);
    }
    return yp;
}

Mat matrix_A_from_map(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p)
{
    const int n = gf.dim();
    const auto centre = forward_YZ(gf, x, u, p);
    const Mat yp = jacobian_Y_p(gf, x, u, p);

    Mat yx(n, n);
    for (int j = 0; j < n; ++j) {
        const double h = fd::step(x[j]);
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        yx.col(j) = (stencil_Y(gf, xp, u, p, centre) - stencil_Y(gf, xm, u, p, centre)) / (2.0 * h);
    }
    const double hu = fd::step(u);
    const Vec yu = (stencil_Y(gf, x, u + hu, p, centre) - stencil_Y(gf, x, u - hu, p, centre)) /
                   (2.0 * hu);

    const Eigen::PartialPivLU<Mat> lu(yp);
    return -lu.solve(yx + yu * p.transpose());
}

//---------------------------------------------------------------------------//
// Q, X and the dual matrices
//---------------------------------------------------------------------------//

Vec map_Q(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z)
{
    const auto b = eval_bundle(gf, x, y, z);
    return -b.grad_y / b.dz;
}

Vec map_X(const GeneratingFunction& gf, const Vec& y, double z, const Vec& q,
          const std::optional<Vec>& guess, int max_iter, double tol)
{
    const int n = gf.dim();
    auto ok = [&](const Vec& x) {
        return x.allFinite() && gf.admissible_pair(view(x), view(y)) &&
               gf.z_interval(view(x), view(y)).contains(z);
    };
    Vec x = guess ? *guess : y;
    if (!ok(x))
        x = Vec::Zero(n);
    if (!ok(x))
        throw Error(ErrorKind::OutOfImage, "no admissible starting point for X(y, z, q)");

    const double scale = 1.0 + q.lpNorm<Eigen::Infinity>();
    auto eval = [&](const Vec& xv, DerivativeBundle& b) {
        b = gf.derivatives(xv, y, z);
        return Vec(-b.grad_y / b.dz - q);
    };
    DerivativeBundle b;
    Vec r = eval(x, b);
    double rnorm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < max_iter; ++it) {
        if (rnorm <= tol * scale)
            return x;
        const Mat e = b.hess_xy - b.grad_xz * b.grad_y.transpose() / b.dz;
        const Mat jac = -e.transpose() / b.dz;
        const Vec step = Eigen::PartialPivLU<Mat>(jac).solve(-r);
        if (!step.allFinite())
            throw Error(ErrorKind::NoConvergence, "singular Jacobian in X Newton");
        bool accepted = false;
        double lambda = 1.0;
        for (int half = 0; half < 40; ++half, lambda *= 0.5) {
            const Vec x_new = x + lambda * step;
            if (!ok(x_new))
                continue;
            DerivativeBundle b_new;
            const Vec r_new = eval(x_new, b_new);
            const double n_new = r_new.lpNorm<Eigen::Infinity>();
            if (n_new < rnorm) {
                x = x_new;
                b = b_new;
                r = r_new;
                rnorm = n_new;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (rnorm <= 1e3 * tol * scale)
                return x;
            throw Error(ErrorKind::OutOfImage, "q is not in the image of Q(., y, z)");
        }
    }
    if (rnorm <= tol * scale)
        return x;
    throw Error(ErrorKind::NoConvergence, "X Newton did not converge");
}

DualABValue dual_Astar_Bstar(const GeneratingFunction& gf, const Vec& y, double z, const Vec& q,
                             const Density& f, const Density& g, const std::optional<Vec>& guess)
{
    const int n = gf.dim();
    DualABValue out;
    out.x = map_X(gf, y, z, q, guess);
    const auto b = eval_bundle(gf, out.x, y, z);
    const double gz = b.dz;
    const Mat w_y = b.hess_yy / gz - b.grad_y * b.grad_yz.transpose() / (gz * gz);
    const Vec w_z = b.grad_yz / gz - b.grad_y * (b.dzz / (gz * gz));
    out.a_star = -(w_y + w_z * q.transpose());
    const Mat e = b.hess_xy - b.grad_xz * b.grad_y.transpose() / gz;
    const double fx = f ? f(out.x) : 1.0;
    const double gy = g ? g(y) : 1.0;
    out.b_star = std::pow(-1.0 / gz, n) * std::abs(e.determinant()) * gy / fx;
    return out;
}

}  // namespace gjet
