#pragma once

#include <utility>
#include <vector>

#include "weylab/ma/density.hpp"

namespace weylab {

// A section of the cotractor bundle (the 1-jet prolongation of the weight-1
// density line), written in the splitting determined by a representative
// connection: a weight-1 density component sigma and a weight-1 covector mu.
// Changing the representative by Upsilon re-expresses the same section as
// (sigma, mu + Upsilon sigma).
struct CotractorField {
    Connection rep;    // the representative whose splitting sigma/mu refers to
    TensorField sigma; // rank 0, weight 1
    TensorField mu;    // (0,1), weight 1

    static CotractorField make(Connection rep, TensorField sigma, TensorField mu);
};

// Re-expresses t in the splitting of rep changed by upsilon.
CotractorField change_representative(const CotractorField& t, const TensorField& upsilon);

// The cotractor connection in the representative's splitting:
//   grad^T_a (sigma, mu_b) = (grad_a sigma - mu_a, grad_a mu_b - P_ab sigma).
// The relative sign of the P term is pinned by flatness on projectively flat
// classes (see the curvature tests).
struct CotractorDerivative {
    TensorField d_sigma;  // (0,1), weight 1
    TensorField d_mu;     // (0,2), weight 1; at({a,b}) = (grad^T_a t)_b
};
CotractorDerivative cotractor_derivative(const CotractorField& t);

// The splitting operator S(sigma) = (sigma, grad sigma); projecting back to
// the density component is the identity, and the symmetric part of the
// mu-component of grad^T S(sigma) is the projective Hessian H(sigma).
CotractorField bgg_split(const DensityField& sigma, const Connection& rep);

// Curvature of the cotractor connection on coordinate 2-planes, as matrices
// acting on the fiber coordinates (sigma, mu_1..mu_n), sigma first.
struct TractorCurvatureSample {
    std::vector<std::pair<int, int>> planes;           // (i, j), i < j
    std::vector<std::vector<Eigen::MatrixXd>> kappa;   // [point][plane]
};
TractorCurvatureSample tractor_curvature(const Connection& rep,
                                         std::span<const std::vector<double>> points);

// Thm-4.1-style correspondence: a Weyl section maps to the line spanned by
// (1, -psi) in the base representative's splitting; any line transversal to
// the sigma = 0 hyperplane arises this way, and the inverse recovers psi.
CotractorField line_from_section(const WeylSection& s);
TensorField section_from_line(const CotractorField& t,
                              std::span<const std::vector<double>> check_points = {});

}  // namespace weylab
