#pragma once

#include <vector>

#include "weylab/section/section.hpp"

namespace weylab {

// A projective density in the chart trivialization: the coordinate volume
// form has component 1, so a weight-w density is just a scalar component
// field plus the weight tag. With this convention the volume-form line
// carries weight -(n+1).
struct DensityField {
    ChartPtr chart;
    Rational weight;
    ScalarField component;

    static DensityField make(ChartPtr chart, Rational weight, ScalarField component);
    // The density as a weighted scalar tensor, for covariant calculus.
    TensorField as_tensor() const;
};

// The canonical alternating symbol as an (n,0) tensor of weight -(n+1)
// (a trivialization of the top exterior power of the tangent bundle).
TensorField tautological_volume(const ChartPtr& chart);

// Determinant of a (0,2) form by explicit double contraction with the
// alternating symbol, 1/n! epsilon epsilon H...H. Provably equal to the
// matrix determinant of the component matrix in this gauge; kept as an
// independent oracle for that fact.
ScalarField det_by_epsilon(const TensorField& g);

// The Weyl structure making sigma parallel: Upsilon_i = -(grad0_i sigma)/sigma
// for a weight-1 density. Checks sigma away from zero at the given sample
// points (ZeroDensityError).
WeylSection weyl_from_density(const DensityField& sigma, const Connection& nabla0,
                              std::span<const std::vector<double>> check_points = {});

// H(sigma) = sym(grad grad sigma - Rho sigma) in the given representative;
// valence (0,2), weight 1, independent of the representative choice.
TensorField projective_hessian(const DensityField& sigma, const Connection& representative);

struct MaReport {
    std::vector<double> residual;     // det H(sigma) - sign sigma^{-n-2}, per point
    double max_residual = 0;
    double det_rho_parallel_residual = 0;  // max |grad^s det Rho^s|
    double det_identity_residual = 0;      // det H - (-1)^n sigma^n det sym Rho^s
};

// Residual of the determinant equation det H(sigma) = sign * sigma^{-n-2} in
// the chart gauge, plus the reformulations through the induced Weyl
// structure. sign must be +1 or -1.
MaReport ma_residual(const DensityField& sigma, int sign, const Connection& nabla0,
                     std::span<const std::vector<double>> points);

struct ConvexityCertificate {
    bool is_ma_solution = false;
    bool rho_positive_definite = false;
    double minimal_lagrangian_residual = 0;
    double scale = 1.0;  // the constant multiple of sigma that was certified
};

// Local properly-convex certificate on a projectively flat class: solves the
// determinant equation with sign (-1)^n up to a constant multiple of sigma
// (fitted from the first sample point), with sym Rho positive definite and
// the induced section minimal. Throws NotFlatError unless W and Y vanish.
ConvexityCertificate convexity_certificate(const DensityField& sigma,
                                           const Connection& nabla0,
                                           std::span<const std::vector<double>> points,
                                           double tol = 1e-8);

}  // namespace weylab
