#pragma once

#include "gjet/conditions/report.hpp"
#include "gjet/conditions/sampling.hpp"
#include "gjet/core/random.hpp"
#include "gjet/genfun/generating_function.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace gjet {

struct CheckTolerances
{
    double delta = 1e-8;          // lower bound for |det E| and injectivity Jacobians
    double weak_tol = 1e-6;       // allowed negativity for weak conditions
    double g3_min = 1e-6;         // strict lower bound for G3
    double collision_tol = 1e-9;  // relative output distance counted as a collision
    double input_tol = 1e-6;      // inputs closer than this are the same point
    double g5_tol = 1e-9;
    /// det E below delta within this fraction of I(x, y) from an endpoint is
    /// reported inconclusive rather than failed.
    double boundary_fraction = 1e-6;
    int min_samples = 10;
    /// Relative step of the tensor second differences; 0 selects fd::step2.
    double fd_step = 0.0;
};

enum class Side { Primal, Dual };

/// G1 (primal): (G_x, G)(x, ., .) one-to-one with G_z det E != 0.
/// G1* (dual): Q(., y, z) one-to-one with det(-E / G_z) != 0.
ConditionRecord check_injectivity(const GeneratingFunction& gf, Side side, const SampleSpec& spec,
                                  const CheckTolerances& tol = {});

ConditionRecord check_G2(const GeneratingFunction& gf, const SampleSpec& spec,
                         const CheckTolerances& tol = {});

/// Contracted tensor value with an estimate of its finite-difference noise.
struct MtwValue
{
    double value = 0.0;
    double noise = 0.0;
};

/// Primal (a = x, b = y): second difference in p along eta of
/// xi^T A(x, u, p) xi at u = G, p = G_x.
/// Dual (a = y, b = x): second difference in q along xi of
/// eta^T A*(y, z, q) eta at q = Q(x, y, z).
/// xi and eta are normalized; they must be orthogonal. A positive fd_step
/// sets the step to fd_step max(1, |p|).
MtwValue mtw_tensor_detail(const GeneratingFunction& gf, Side side, const Vec& a, const Vec& b,
                           double z, const Vec& xi, const Vec& eta, double fd_step = 0.0);
double mtw_tensor(const GeneratingFunction& gf, Side side, const Vec& a, const Vec& b, double z,
                  const Vec& xi, const Vec& eta);

/// Random orthonormal pair (xi, eta); empty vectors in one dimension.
std::pair<Vec, Vec> orthonormal_pair(Rng& rng, int dim);

/// G3 / G3w on both sides plus the pointwise sign agreement between them.
/// Records: "G3" (primal), "G3*" (dual), "G3 duality".
ConditionReport check_G3_family(const GeneratingFunction& gf, const SampleSpec& spec, bool strict,
                                const CheckTolerances& tol = {});

/// D_{p_k} A_ij at u = G(x,y,z), p = G_x(x,y,z), returned as one matrix per k,
/// assembled from E^{-1}, x-differences of E and exact G_xz / G_z.
std::vector<Mat> dp_A_chainrule(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z);

/// Same quantity by central differences of matrix_A in p (test oracle).
std::vector<Mat> dp_A_finite_difference(const GeneratingFunction& gf, const Vec& x, const Vec& y,
                                        double z);

/// Minimum eigenvalue of D_u A over the samples.
ConditionRecord check_G4w(const GeneratingFunction& gf, const SampleSpec& spec,
                          const CheckTolerances& tol = {});

/// |G_x| <= K0 wherever G > m0. `declared` overrides the instance's constants.
ConditionRecord check_G5(const GeneratingFunction& gf, const SampleSpec& spec,
                         const std::optional<G5Constants>& declared = std::nullopt,
                         const CheckTolerances& tol = {});

}  // namespace gjet
