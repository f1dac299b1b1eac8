#pragma once

#include <span>
#include <vector>

#include "weylab/geom/tensor.hpp"

namespace weylab {

// A torsion-free affine connection on a chart, viewed as a representative of
// its projective class. Coefficients are stored symmetric in the lower slots;
// construction symmetrizes whatever is supplied.
struct Connection {
    ChartPtr chart;
    TensorField gamma;  // valence (1,2), gamma.at({k,i,j}) = Gamma^k_{ij}

    static Connection from_gamma(const TensorField& gamma);
    static Connection flat(ChartPtr chart);
    static Connection levi_civita(const TensorField& metric);
};

// Curvature R of the connection, valence (1,3), stored as
//   at({k,i,j,l}) = R_{ij}{}^k{}_l
//                 = d_i Gamma^k_{jl} - d_j Gamma^k_{il}
//                 + Gamma^k_{im} Gamma^m_{jl} - Gamma^k_{jm} Gamma^m_{il}.
TensorField curvature(const Connection& conn);

// Ricci trace convention: Ric_{jl} = R_{ij}{}^i{}_l (first covariant slot
// contracted against the output slot).
TensorField ricci(const Connection& conn);

// The projective Rho tensor for the Ricci convention above:
//   P_{ij} = -Ric_{(ij)}/(n-1) - Ric_{[ij]}/(n+1),
// the unique tensor making W = R + 2 delta^k_{[i} P_{j]l} - 2 P_{[ij]} delta^k_l
// trace-free. Note the sign: for hyperbolic metrics P = +g.
TensorField rho(const Connection& conn);

// Trace-free projective Weyl curvature, same slot layout as curvature().
TensorField weyl_curvature(const Connection& conn);

// Y_{ijk} = grad_i P_{jk} - grad_j P_{ik}, valence (0,3), skew in (i,j),
// with vanishing complete alternation.
TensorField cotton_york(const Connection& conn);

// Projective change of representative by a one-form:
//   Gamma^k_{ij} -> Gamma^k_{ij} + delta^k_i Upsilon_j + delta^k_j Upsilon_i.
Connection projective_change(const Connection& conn, const TensorField& upsilon);

// Max-abs residual, over the given points, of the density change law
//   grad-hat sigma = grad sigma + w Upsilon sigma
// for a weight-w scalar density sigma.
double density_change_check(const Connection& conn, const TensorField& upsilon,
                            const ScalarField& sigma, Rational w,
                            std::span<const std::vector<double>> points);

// The hyperbolic metric on the open unit ball in projective (Beltrami)
// coordinates: g_ij = delta_ij / u^2 + x_i x_j / u^4 with u^2 = 1 - |x|^2.
// Its geodesics are straight chords, Ric = -(n-1) g, and P = g.
TensorField klein_ball_metric(const ChartPtr& chart);

}  // namespace weylab
