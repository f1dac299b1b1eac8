#pragma once

#include <vector>

#include <Eigen/Dense>

#include "weylab/proj/connection.hpp"

namespace weylab {

// Coordinate model of the total space carrying all Weyl structures of the
// projective class of a reference connection nabla0 on an n-dimensional base.
// Coordinates on the 2n-dimensional total chart are (x^1..x^n, psi_1..psi_n),
// where psi is the one-form parameterizing the Weyl structure relative to
// nabla0 (the affine structure of the space of representatives).
//
// The structure one-forms are P_j = dpsi_j + A_ij dx^i with
//   A_ij(x, psi) = P0_ij(x) - Gamma^k_ij(x) psi_k - psi_i psi_j
// (P0 = Rho of nabla0). Their kernel is spanned by the horizontal frame
//   e~_i = d/dx^i - A_ij d/dpsi_j,        (L- directions)
// and the vertical frame is e~^j = d/dpsi_j (L+ directions).
struct BundleSpace {
    ChartPtr base;       // dim n
    Connection nabla0;   // reference representative on the base
    ChartPtr total;      // dim 2n; domain mirrors the base domain
    TensorField A;       // (0,2) on the total chart, at({i,j}) = A_ij(x,psi)
    TensorField gamma_psi;  // (1,2) on the total chart, see fiber_gamma()

    int n() const { return base->dim(); }

    static BundleSpace make(const Connection& nabla0);
};

// --- coordinate/frame plumbing ---------------------------------------------

// Embeds a base field/tensor into the total chart (reading x^i from the first
// n coordinates).
ScalarField lift_to_total(const BundleSpace& bs, const ScalarField& f);
TensorField lift_to_total(const BundleSpace& bs, const TensorField& t);

// Coordinate components of adapted frame vector a (0..n-1: e~_i, n..2n-1: e~^j)
// as a (1,0) tensor field on the total chart.
TensorField frame_vector(const BundleSpace& bs, int a);

// Directional derivative of a total-chart scalar along adapted frame vector a.
ScalarField frame_derivative(const BundleSpace& bs, const ScalarField& f, int a);

// Conversions between coordinate components and adapted-frame coefficients of
// a vector field on the total space (both stored as (1,0) tensors on the
// total chart; frame coefficients: first n entries L-, last n entries L+).
TensorField to_frame_coeffs(const BundleSpace& bs, const TensorField& coord_vec);
TensorField to_coord_vec(const BundleSpace& bs, const TensorField& frame_coeffs);

// Coordinate Lie bracket of two (1,0) vector fields on the same chart.
TensorField coord_bracket(const TensorField& X, const TensorField& Y);

// --- the almost bi-Lagrangian pair -----------------------------------------

// Omega = dx^j /\ P_j as a (0,2) coordinate-component tensor on the total
// chart (skew). Sign convention: with the dx factor first,
// Omega(e~_i, e~^j) = +delta_i^j.
TensorField bundle_two_form(const BundleSpace& bs);

// h = dx^j (.) P_j, the split-signature (n,n) metric; h(e~_i, e~^j) = delta.
TensorField bundle_metric(const BundleSpace& bs);

// --- canonical connection ---------------------------------------------------

// The fiberwise projective-change coefficients Gamma(psi)^k_{ij} =
// Gamma0^k_{ij} + delta^k_i psi_j + delta^k_j psi_i as a (1,2) tensor on the
// total chart. These are the L- connection coefficients of D in the adapted
// frame; the L+ coefficients are the negative dual.
TensorField fiber_gamma(const BundleSpace& bs);

// D_{e~_a} W for a vector field W given by adapted-frame coefficients; the
// result is again an adapted-frame coefficient field. Along L- directions
// (a < n) the frame coefficients see the Gamma(psi) terms; along L+
// directions (a >= n) only the coefficient derivative survives, so constant
// frame fields are L+-parallel.
TensorField canonical_connection_apply(const BundleSpace& bs, const TensorField& W, int a);

// D_V W for V, W adapted-frame coefficient fields.
TensorField canonical_connection_along(const BundleSpace& bs, const TensorField& V,
                                       const TensorField& W);

// --- torsion, curvature, algebraic bracket ---------------------------------

struct TorsionCurvature {
    // tau[a][b]: adapted-frame components (size 2n) of tau(e~_a, e~_b).
    std::vector<std::vector<Eigen::VectorXd>> tau;
    // rho[a][b]: 2n x 2n matrix of the curvature operator rho(e~_a, e~_b)
    // acting on adapted-frame components.
    std::vector<std::vector<Eigen::MatrixXd>> rho;
};

TorsionCurvature torsion_curvature_D(const BundleSpace& bs, std::span<const double> p);

// The degree-zero part of the algebraic bracket of a tangent vector xi and a
// cotangent vector alpha in the projective matrix model, acting on the
// (L- + L+) fiber. Computed from explicit sl(n+1) block matrices: xi embeds
// as the lower-left n x 1 block, alpha as the upper-right 1 x n block; the
// action on each argument is a genuine matrix commutator.
Eigen::MatrixXd algebraic_bracket_g0(const Eigen::VectorXd& xi, const Eigen::VectorXd& alpha);

// Coordinate-basis connection coefficients of D at a point, indexed [c][a][b]
// (output slot first).
std::vector<Eigen::MatrixXd> d_coordinate_coefficients(const BundleSpace& bs,
                                                       std::span<const double> p);

// --- Levi-Civita connection of h -------------------------------------------

struct LeviCivitaH {
    // Coordinate-basis Christoffel symbols at the point, indexed [c][a][b]
    // (output slot first), computed two independent ways.
    std::vector<Eigen::MatrixXd> from_metric_jets;  // route (a): jets of h
    std::vector<Eigen::MatrixXd> from_d_plus_contorsion;  // route (b)
    // Contorsion C^c_{ab} relative to D, route-(b) byproduct.
    std::vector<Eigen::MatrixXd> contorsion;
    double route_disagreement;  // max-abs difference of the two routes
};

LeviCivitaH levi_civita_h(const BundleSpace& bs, std::span<const double> p);

// --- Einstein property and closedness --------------------------------------

struct EinsteinReport {
    std::vector<double> lambda;   // trace ratio <Ric, h^{-1}>/(2n) per point
    double einstein_residual;     // max over points of |Ric - lambda h| / max|h|
    double d_omega_residual;      // max-abs coordinate exterior derivative of Omega
};

EinsteinReport einstein_and_closedness(const BundleSpace& bs,
                                       std::span<const std::vector<double>> points);

// Numeric kernel: Ricci tensor of a metric at a point from the order-2 jets
// of its components (all jets on the same layout, dim = metric dimension).
// Independent of the symbolic connection machinery, so it can cross-check it.
Eigen::MatrixXd ricci_from_metric_jets(const std::vector<std::vector<Jet>>& h2jets);

}  // namespace weylab
