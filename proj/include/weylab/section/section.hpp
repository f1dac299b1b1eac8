#pragma once

#include <vector>

#include "weylab/bundle/bundle.hpp"

namespace weylab {

// A Weyl structure presented as a section of the bundle: a covector field psi
// on the base, with the induced representative connection and its Rho tensor.
// The image of the graph map x -> (x, psi(x)) is the submanifold the
// classification and curvature routines below study.
struct WeylSection {
    Connection nabla0;   // reference representative (fixes the bundle chart)
    TensorField psi;     // (0,1) on the base
    Connection nabla_s;  // projective change of nabla0 by psi
    TensorField rho_s;   // Rho tensor of nabla_s

    static WeylSection make(const Connection& nabla0, const TensorField& psi);
    int n() const { return nabla0.chart->dim(); }
    std::vector<double> graph_point(std::span<const double> x) const;
};

// A section whose Rho tensor is symmetric (image Lagrangian). The skew part
// of Rho is d(trace Gamma + (n+1) psi) / (2(n+1)), so
//   psi_j = -Gamma^k_{kj}/(n+1) + d_j phi
// kills it for any potential phi; phi shapes the symmetric part.
TensorField lagrangian_section(const Connection& nabla0, const ScalarField& phi);

struct SectionClassification {
    bool lagrangian = false;
    bool nondegenerate = false;
    double max_skew = 0;          // max |alt Rho| over the sample points
    double min_det_sym = 0;       // min |det sym Rho| over the sample points
    double pullback_residual = 0; // graph pullback of (Omega, h) vs (-2 alt, 2 sym) Rho
};

// Classifies via the Rho tensor, after cross-checking the defining pullback
// identities by direct coordinate pullback through the graph Jacobian.
SectionClassification classify_section(const WeylSection& s,
                                       std::span<const std::vector<double>> base_points,
                                       double zero_tol = 1e-8, double det_tol = 1e-6);

struct SecondFundamentalForms {
    // Both (1,2) on the base, valued through the normal-space identification
    // with base tangent vectors.
    TensorField ii_d;  // ambient: canonical connection D
    TensorField ii_h;  // ambient: Levi-Civita connection of h
};

// Formula route: II_D^k_{ij} = -1/2 P^{ka} grad^s_i P_{ja} and
// II_h^k_{ij} = -1/2 P^{ka} (grad^s_i P_{ja} + grad^s_j P_{ia} - grad^s_a P_{ij}),
// with P^{ka} the inverse of sym Rho. Requires the section to be Lagrangian
// and non-degenerate at the given sample points.
SecondFundamentalForms second_fundamental_forms(
    const WeylSection& s, std::span<const std::vector<double>> base_points,
    double zero_tol = 1e-8, double det_tol = 1e-6);

enum class AmbientConnection { CanonicalD, LeviCivitaH };

// Extrinsic route, fully numeric and independent of the formulas above: push
// the coordinate frame through the graph, differentiate the pushed frames
// with the ambient connection's coordinate coefficients on the total space,
// split off the h-orthogonal normal part in the adapted frame, and read the
// result as a base vector through the first (L-) component. Returns, per
// sample point, n matrices indexed [k](i,j) = II^k_{ij}.
std::vector<std::vector<Eigen::MatrixXd>> extrinsic_ii_oracle(
    const WeylSection& s, AmbientConnection ambient,
    std::span<const std::vector<double>> base_points);

struct SectionResiduals {
    double minimal_residual = 0;          // max |P^{ab}(2 grad_a P_{bi} - grad_i P_{ab})|
    double totally_geodesic_residual = 0; // max |grad^s Rho^s|
    std::vector<double> minimal_by_point;
    // Mean curvature vector per point: P^{ij} II_h^._{ij}, a base vector.
    std::vector<Eigen::VectorXd> mean_curvature;
};

SectionResiduals section_residuals(const WeylSection& s,
                                   std::span<const std::vector<double>> base_points,
                                   double det_tol = 1e-6);

}  // namespace weylab
