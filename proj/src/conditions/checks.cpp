#include "gjet/conditions/checks.hpp"

#include "gjet/core/errors.hpp"
#include "gjet/core/finite_diff.hpp"
#include "gjet/genfun/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gjet {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Mat e_from_bundle(const DerivativeBundle& b)
{
    return b.hess_xy - b.grad_xz * b.grad_y.transpose() / b.dz;
}

Witness make_witness(const Vec& x, const Vec& y, double z, const Vec& xi = {}, const Vec& eta = {})
{
    return Witness{x, y, z, xi, eta};
}

ConditionRecord too_few(std::string name, int used)
{
    ConditionRecord r;
    r.name = std::move(name);
    r.status = Status::Inconclusive;
    r.samples_used = used;
    r.note = "fewer samples than required";
    return r;
}

// A(x, u, p) for difference stencils; generating functions without a
// closed form warm start from the stencil centre.
Mat stencil_A(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p, const Vec& y,
              double z)
{
    ForwardOptions opts;
    if (!gf.closed_forms())
        opts.guess = std::make_pair(y, z);
    return matrix_A(gf, x, u, p, opts);
}

// Outputs compared for collisions, sorted on their first coordinate.
struct MappedSample
{
    Vec input;
    Vec output;
    std::size_t source;
};

// Index pair of the first collision, if any.
std::optional<std::pair<std::size_t, std::size_t>> find_collision(std::vector<MappedSample>& pts,
                                                                  const CheckTolerances& tol)
{
    double scale = 0.0;
    for (const auto& s : pts)
        scale = std::max(scale, s.output.lpNorm<Eigen::Infinity>());
    const double window = tol.collision_tol * (1.0 + scale);
    std::sort(pts.begin(), pts.end(), [](const MappedSample& a, const MappedSample& b) {
        return a.output[0] < b.output[0] || (a.output[0] == b.output[0] && a.source < b.source);
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (pts[j].output[0] - pts[i].output[0] > window)
                break;
            if ((pts[j].output - pts[i].output).norm() <= window &&
                (pts[j].input - pts[i].input).norm() > tol.input_tol)
                return std::make_pair(i, j);
        }
    }
    return std::nullopt;
}

}  // namespace

//---------------------------------------------------------------------------//
// G1, G1*
//---------------------------------------------------------------------------//

ConditionRecord check_injectivity(const GeneratingFunction& gf, Side side, const SampleSpec& spec,
                                  const CheckTolerances& tol)
{
    const int n = gf.dim();
    const std::string name = side == Side::Primal ? "G1" : "G1*";
    const auto samples = draw_samples(gf, spec);
    if (static_cast<int>(samples.size()) < tol.min_samples)
        return too_few(name, static_cast<int>(samples.size()));

    ConditionRecord rec;
    rec.name = name;
    rec.extremal_value = kInf;
    const std::size_t anchors = std::min<std::size_t>(16, samples.size());
    const std::size_t stride = samples.size() / anchors;
    std::optional<Witness> min_witness;
    std::optional<Witness> collision;
    std::string collision_note;

    for (std::size_t a = 0; a < anchors && !collision; ++a) {
        const auto& anchor = samples[a * stride];
        std::vector<MappedSample> pts;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            Vec x, y;
            double z;
            if (side == Side::Primal) {
                x = anchor.x;
                y = samples[s].y;
                if (!gf.admissible_pair(view(x), view(y)))
                    continue;
                const Interval iv = gf.z_interval(view(x), view(y));
                z = z_at_fraction(iv, samples[s].z_fraction, spec.z_scale);
                if (!iv.contains(z))
                    continue;
            } else {
                x = samples[s].x;
                y = anchor.y;
                z = anchor.z;
                if (!gf.admissible_pair(view(x), view(y)) ||
                    !gf.z_interval(view(x), view(y)).contains(z))
                    continue;
            }
            const auto b = gf.derivatives(x, y, z);
            const double det_e = e_from_bundle(b).determinant();
            MappedSample m;
            m.source = s;
            double jac;
            if (side == Side::Primal) {
                m.input = Vec(n + 1);
                m.input << y, z;
                m.output = Vec(n + 1);
                m.output << b.grad_x, b.value;
                jac = std::abs(b.dz * det_e);
            } else {
                m.input = x;
                m.output = -b.grad_y / b.dz;
                jac = std::abs(std::pow(-1.0 / b.dz, n) * det_e);
            }
            ++rec.samples_used;
            if (jac < rec.extremal_value) {
                rec.extremal_value = jac;
                min_witness = make_witness(x, y, z);
            }
            pts.push_back(std::move(m));
        }
        if (auto hit = find_collision(pts, tol)) {
            const auto& s1 = samples[pts[hit->first].source];
            if (side == Side::Primal) {
                collision = make_witness(anchor.x, s1.y, pts[hit->first].input[n]);
                collision_note = "outputs of (G_x, G) coincide for distinct (y, z)";
            } else {
                collision = make_witness(s1.x, anchor.y, anchor.z);
                collision_note = "Q(., y, z) coincides at distinct x";
            }
        }
    }

    if (rec.samples_used < tol.min_samples)
        return too_few(name, rec.samples_used);
    if (collision) {
        rec.status = Status::Fail;
        rec.witness = collision;
        rec.note = collision_note;
    } else if (rec.extremal_value < tol.delta) {
        rec.status = Status::Fail;
        rec.witness = min_witness;
        rec.note = "Jacobian determinant below delta";
    } else {
        rec.status = Status::Pass;
        rec.witness = min_witness;
    }
    return rec;
}

//---------------------------------------------------------------------------//
// G2
//---------------------------------------------------------------------------//

namespace {

bool near_interval_end(const Interval& iv, double z, double fraction)
{
    const double width = (std::isfinite(iv.lo) && std::isfinite(iv.hi)) ? iv.hi - iv.lo
                                                                         : std::max(1.0, std::abs(z));
    return (std::isfinite(iv.lo) && z - iv.lo <= fraction * width) ||
           (std::isfinite(iv.hi) && iv.hi - z <= fraction * width);
}

}  // namespace

ConditionRecord check_G2(const GeneratingFunction& gf, const SampleSpec& spec,
                         const CheckTolerances& tol)
{
    const auto samples = draw_samples(gf, spec);
    if (static_cast<int>(samples.size()) < tol.min_samples)
        return too_few("G2", static_cast<int>(samples.size()));
    ConditionRecord rec;
    rec.name = "G2";
    rec.extremal_value = kInf;
    bool interior_low = false;
    bool boundary_low = false;
    for (const auto& s : samples) {
        const double det = std::abs(e_from_bundle(gf.derivatives(s.x, s.y, s.z)).determinant());
        ++rec.samples_used;
        if (det < tol.delta) {
            const bool edge = near_interval_end(gf.z_interval(view(s.x), view(s.y)), s.z,
                                                tol.boundary_fraction);
            (edge ? boundary_low : interior_low) = true;
            if (!edge && !rec.witness.has_value())
                rec.witness = make_witness(s.x, s.y, s.z);
        }
        if (!(det >= rec.extremal_value)) {
            rec.extremal_value = det;
            if (!interior_low)
                rec.witness = make_witness(s.x, s.y, s.z);
        }
    }
    if (interior_low) {
        rec.status = Status::Fail;
        rec.note = "|det E| below delta";
    } else if (boundary_low) {
        rec.status = Status::Inconclusive;
        rec.note = "|det E| below delta only next to an endpoint of I(x, y)";
    } else {
        rec.status = Status::Pass;
    }
    return rec;
}

//---------------------------------------------------------------------------//
// MTW tensor
//---------------------------------------------------------------------------//

MtwValue mtw_tensor_detail(const GeneratingFunction& gf, Side side, const Vec& a, const Vec& b,
                           double z, const Vec& xi_in, const Vec& eta_in, double fd_step)
{
    if (xi_in.norm() == 0.0 || eta_in.norm() == 0.0)
        throw Error(ErrorKind::InvalidArgument, "xi and eta must be nonzero");
    const Vec xi = xi_in.normalized();
    const Vec eta = eta_in.normalized();
    if (std::abs(xi.dot(eta)) > 1e-12)
        throw Error(ErrorKind::InvalidArgument, "xi and eta must be orthogonal");

    auto step = [fd_step](double v) {
        return fd_step > 0.0 ? fd_step * std::max(1.0, v) : fd::step2(v);
    };
    double f[3];
    double h;
    if (side == Side::Primal) {
        const Vec& x = a;
        const Vec& y = b;
        const auto bd = eval_bundle(gf, x, y, z);
        const double u = bd.value;
        const Vec& p = bd.grad_x;
        h = step(p.norm());
        for (int s = -1; s <= 1; ++s) {
            const Mat am = stencil_A(gf, x, u, p + (s * h) * eta, y, z);
            f[s + 1] = xi.dot(am * xi);
        }
    } else {
        const Vec& y = a;
        const Vec& x = b;
        const Vec q = map_Q(gf, x, y, z);
        h = step(q.norm());
        for (int s = -1; s <= 1; ++s) {
            const auto d = dual_Astar_Bstar(gf, y, z, q + (s * h) * xi, nullptr, nullptr, x);
            f[s + 1] = eta.dot(d.a_star * eta);
        }
    }
    MtwValue out;
    out.value = (f[2] - 2.0 * f[1] + f[0]) / (h * h);
    const double mag = std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
    out.noise = 64.0 * kEps * (1.0 + mag) / (h * h);
    return out;
}

double mtw_tensor(const GeneratingFunction& gf, Side side, const Vec& a, const Vec& b, double z,
                  const Vec& xi, const Vec& eta)
{
    return mtw_tensor_detail(gf, side, a, b, z, xi, eta).value;
}

std::pair<Vec, Vec> orthonormal_pair(Rng& rng, int dim)
{
    if (dim < 2)
        return {Vec(), Vec()};
    for (;;) {
        const Vec xi = rng.unit_vector(dim);
        Vec eta = rng.unit_vector(dim);
        eta -= eta.dot(xi) * xi;
        const double nrm = eta.norm();
        if (nrm < 1e-6)
            continue;
        eta /= nrm;
        // One re-orthogonalization pass pins |xi.eta| at roundoff level.
        eta -= eta.dot(xi) * xi;
        eta.normalize();
        return {xi, eta};
    }
}

ConditionReport check_G3_family(const GeneratingFunction& gf, const SampleSpec& spec, bool strict,
                                const CheckTolerances& tol)
{
    ConditionReport report;
    const int n = gf.dim();
    if (n < 2) {
        for (const char* nm : {"G3", "G3*", "G3 duality"}) {
            auto r = too_few(nm, 0);
            r.note = "no orthogonal pairs in one dimension";
            report.records.push_back(r);
        }
        return report;
    }
    const auto samples = draw_samples(gf, spec);
    Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);

    ConditionRecord primal, dual, duality;
    primal.name = "G3";
    dual.name = "G3*";
    duality.name = "G3 duality";
    primal.extremal_value = kInf;
    dual.extremal_value = kInf;
    int compared = 0;
    for (const auto& s : samples) {
        const auto [xi, eta] = orthonormal_pair(rng, n);
        MtwValue pv, dv;
        try {
            pv = mtw_tensor_detail(gf, Side::Primal, s.x, s.y, s.z, xi, eta, tol.fd_step);
            dv = mtw_tensor_detail(gf, Side::Dual, s.y, s.x, s.z, xi, eta, tol.fd_step);
        } catch (const Error&) {
            ++primal.samples_skipped;
            ++dual.samples_skipped;
            continue;
        }
        ++primal.samples_used;
        ++dual.samples_used;
        if (pv.value < primal.extremal_value) {
            primal.extremal_value = pv.value;
            primal.witness = make_witness(s.x, s.y, s.z, xi, eta);
        }
        if (dv.value < dual.extremal_value) {
            dual.extremal_value = dv.value;
            dual.witness = make_witness(s.x, s.y, s.z, xi, eta);
        }
        if (std::abs(pv.value) > 10.0 * pv.noise) {
            ++compared;
            const bool disagree = (pv.value > 0.0 && dv.value < -10.0 * dv.noise) ||
                                  (pv.value < 0.0 && dv.value > 10.0 * dv.noise);
            if (disagree) {
                duality.extremal_value += 1.0;
                if (!duality.witness)
                    duality.witness = make_witness(s.x, s.y, s.z, xi, eta);
            }
        }
    }
    duality.samples_used = compared;
    duality.samples_skipped = primal.samples_skipped;

    for (auto* r : {&primal, &dual}) {
        if (r->samples_used < tol.min_samples) {
            r->status = Status::Inconclusive;
            r->note = "fewer samples than required";
        } else if (strict) {
            r->status = r->extremal_value > tol.g3_min ? Status::Pass : Status::Fail;
            if (r->status == Status::Fail)
                r->note = "minimum not above g3_min";
        } else {
            r->status = r->extremal_value >= -tol.weak_tol ? Status::Pass : Status::Fail;
            if (r->status == Status::Fail)
                r->note = "minimum below -weak_tol";
        }
    }
    if (duality.extremal_value > 0.0) {
        duality.status = Status::Fail;
        duality.note = "primal and dual tensors disagree in sign";
    } else if (primal.samples_used < tol.min_samples) {
        duality.note = "fewer samples than required";
    } else {
        duality.status = Status::Pass;
        duality.note = std::to_string(compared) + " samples above the noise floor compared";
    }
    report.records = {primal, dual, duality};
    return report;
}

//---------------------------------------------------------------------------//
// D_p A
//---------------------------------------------------------------------------//

std::vector<Mat> dp_A_chainrule(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z)
{
    const int n = gf.dim();
    const auto b = eval_bundle(gf, x, y, z);
    const Mat e_inv = e_from_bundle(b).inverse();
    if (!e_inv.allFinite())
        throw Error(ErrorKind::SingularE, "E is singular");

    // dE[i](j, r) = d E_jr / d x_i
    std::vector<Mat> de(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double h = fd::step(x[i]);
        auto at = [&](double s) {
            Vec xs = x;
            xs[i] += s * h;
            return e_from_bundle(gf.derivatives(xs, y, z));
        };
        de[static_cast<std::size_t>(i)] = (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h);
    }

    std::vector<Mat> out(static_cast<std::size_t>(n), Mat::Zero(n, n));
    for (int k = 0; k < n; ++k) {
        Mat& d = out[static_cast<std::size_t>(k)];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int r = 0; r < n; ++r)
                    s += e_inv(r, k) * de[static_cast<std::size_t>(i)](j, r);
                if (i == k)
                    s += b.grad_xz[j] / b.dz;
                d(i, j) = s;
            }
    }
    return out;
}

std::vector<Mat> dp_A_finite_difference(const GeneratingFunction& gf, const Vec& x, const Vec& y,
                                        double z)
{
    const int n = gf.dim();
    const auto b = eval_bundle(gf, x, y, z);
    std::vector<Mat> out;
    for (int k = 0; k < n; ++k) {
        const double h = fd::step(b.grad_x[k]);
        // fourth-order stencil; A grows like 1/u near the lower end of I
        auto at = [&](double s) {
            Vec p = b.grad_x;
            p[k] += s * h;
            return stencil_A(gf, x, b.value, p, y, z);
        };
        out.push_back((8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h));
    }
    return out;
}

//---------------------------------------------------------------------------//
// G4w, G5
//---------------------------------------------------------------------------//

ConditionRecord check_G4w(const GeneratingFunction& gf, const SampleSpec& spec,
                          const CheckTolerances& tol)
{
    const auto samples = draw_samples(gf, spec);
    ConditionRecord rec;
    rec.name = "G4w";
    rec.extremal_value = kInf;
    for (const auto& s : samples) {
        const auto b = gf.derivatives(s.x, s.y, s.z);
        const double h = fd::step(b.value);
        Mat du;
        try {
            du = (stencil_A(gf, s.x, b.value + h, b.grad_x, s.y, s.z) -
                  stencil_A(gf, s.x, b.value - h, b.grad_x, s.y, s.z)) /
                 (2.0 * h);
        } catch (const Error&) {
            ++rec.samples_skipped;
            continue;
        }
        const Mat sym = 0.5 * (du + du.transpose());
        const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(sym, Eigen::EigenvaluesOnly)
                                .eigenvalues()
                                .minCoeff();
        ++rec.samples_used;
        if (lmin < rec.extremal_value) {
            rec.extremal_value = lmin;
            rec.witness = make_witness(s.x, s.y, s.z);
        }
    }
    if (rec.samples_used < tol.min_samples) {
        rec.status = Status::Inconclusive;
        rec.note = "fewer samples than required";
    } else if (rec.extremal_value >= -tol.weak_tol) {
        rec.status = Status::Pass;
    } else {
        rec.status = Status::Fail;
        rec.note = "D_u A has a negative eigenvalue";
    }
    return rec;
}

ConditionRecord check_G5(const GeneratingFunction& gf, const SampleSpec& spec,
                         const std::optional<G5Constants>& declared, const CheckTolerances& tol)
{
    ConditionRecord rec;
    rec.name = "G5";
    const auto constants = declared ? declared : gf.g5();
    if (!constants) {
        rec.note = "no G5 constants declared";
        return rec;
    }
    const auto samples = draw_samples(gf, spec);
    double worst = 0.0;
    for (const auto& s : samples) {
        const auto b = gf.derivatives(s.x, s.y, s.z);
        if (!(b.value > constants->m0))
            continue;
        ++rec.samples_used;
        const double g = b.grad_x.norm();
        if (g > worst || !rec.witness) {
            worst = std::max(worst, g);
            rec.witness = make_witness(s.x, s.y, s.z);
        }
    }
    rec.extremal_value = worst;
    if (rec.samples_used < tol.min_samples) {
        rec.status = Status::Inconclusive;
        rec.note = "fewer samples than required";
    } else if (worst <= constants->k0 * (1.0 + tol.g5_tol)) {
        rec.status = Status::Pass;
    } else {
        rec.status = Status::Fail;
        rec.note = "|G_x| exceeds K0";
    }
    return rec;
}

}  // namespace gjet
