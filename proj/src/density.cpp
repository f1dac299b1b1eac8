#include "weylab/ma/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "weylab/errors.hpp"

namespace weylab {

namespace {

int permutation_sign(std::span<const int> perm) {
    int sign = 1;
    for (size_t i = 0; i < perm.size(); ++i)
        for (size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) sign = -sign;
    return sign;
}

double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

DensityField DensityField::make(ChartPtr chart, Rational weight, ScalarField component) {
    if (!chart || !component.valid() || component.dim() != chart->dim())
        throw ShapeError("density: component must live on the chart");
    return DensityField{std::move(chart), weight, std::move(component)};
}

TensorField DensityField::as_tensor() const {
    return TensorField::scalar(chart, component, weight);
}

TensorField tautological_volume(const ChartPtr& chart) {
    const int n = chart->dim();
    return TensorField::build(chart, n, 0, Rational(-(n + 1)),
                              [&](std::span<const int> idx) {
        std::vector<int> seen(n, 0);
        for (int v : idx) seen[v]++;
        for (int c : seen)
            if (c != 1) return ScalarField::constant(n, 0.0);
        return ScalarField::constant(n, double(permutation_sign(idx)));
    });
}

ScalarField det_by_epsilon(const TensorField& g) {
    if (g.rank() != 2) throw ShapeError("det_by_epsilon: expects a rank-2 form");
    const int n = g.dim();
    ScalarField acc = ScalarField::constant(n, 0.0);
    std::vector<int> a(n), b(n);
    std::iota(a.begin(), a.end(), 0);
    do {
        std::iota(b.begin(), b.end(), 0);
        do {
            ScalarField term = ScalarField::constant(
                n, double(permutation_sign(a) * permutation_sign(b)));
            for (int i = 0; i < n; ++i) term = term * g.at({a[i], b[i]});
            acc = acc + term;
        } while (std::next_permutation(b.begin(), b.end()));
    } while (std::next_permutation(a.begin(), a.end()));
    return acc * ScalarField::constant(n, 1.0 / factorial(n));
}

WeylSection weyl_from_density(const DensityField& sigma, const Connection& nabla0,
                              std::span<const std::vector<double>> check_points) {
    if (sigma.weight != Rational(1))
        throw ShapeError("weyl_from_density: expects a weight-1 density");
    for (const auto& x : check_points)
        if (std::abs(sigma.component.eval(x)) < 1e-12)
            throw ZeroDensityError("weyl_from_density: density vanishes at a sample point");
    TensorField grad = covariant_derivative(sigma.as_tensor(), nabla0.gamma);
    ScalarField guarded =
        guard_nonzero(sigma.component, 1e-12, "weyl_from_density: density vanishes");
    TensorField psi = TensorField::build(nabla0.chart, 0, 1, Rational(0),
                                         [&](std::span<const int> idx) {
        return -grad.at({idx[0]}) / guarded;
    });
    return WeylSection::make(nabla0, psi);
}

TensorField projective_hessian(const DensityField& sigma, const Connection& rep) {
    if (sigma.weight != Rational(1))
        throw ShapeError("projective_hessian: expects a weight-1 density");
    TensorField st = sigma.as_tensor();
    TensorField g2 = covariant_derivative(covariant_derivative(st, rep.gamma), rep.gamma);
    return symmetrize(g2 - rho(rep) * st, true, {0, 1});
}

MaReport ma_residual(const DensityField& sigma, int sign, const Connection& nabla0,
                     std::span<const std::vector<double>> points) {
    if (sign != 1 && sign != -1)
        throw ShapeError("ma_residual: sign must be +1 or -1");
    const int n = nabla0.chart->dim();
    WeylSection s = weyl_from_density(sigma, nabla0, points);
    TensorField H = projective_hessian(sigma, nabla0);
    TensorField sym_p = symmetrize(s.rho_s, true, {0, 1});
    // det sym Rho as a density: a (0,2) weight-0 form has determinant weight
    // -2(n+1) in this gauge (two copies of the volume line).
    TensorField det_p =
        TensorField::scalar(nabla0.chart, det_form(sym_p), Rational(-2 * (n + 1)));
    TensorField grad_det_p = covariant_derivative(det_p, s.nabla_s.gamma);

    MaReport rep;
    const double par = (n % 2 == 0) ? 1.0 : -1.0;
    for (const auto& x : points) {
        BatchEvaluator ev(x);
        double det_h = eval_matrix(H, ev).determinant();
        double sv = ev.eval(sigma.component);
        double r = det_h - sign * std::pow(sv, -(n + 2));
        rep.residual.push_back(r);
        rep.max_residual = std::max(rep.max_residual, std::abs(r));
        rep.det_rho_parallel_residual =
            std::max(rep.det_rho_parallel_residual, max_abs(grad_det_p, ev));
        double det_ps = eval_matrix(sym_p, ev).determinant();
        rep.det_identity_residual =
            std::max(rep.det_identity_residual,
                     std::abs(det_h - par * std::pow(sv, n) * det_ps));
    }
    return rep;
}

ConvexityCertificate convexity_certificate(const DensityField& sigma,
                                           const Connection& nabla0,
                                           std::span<const std::vector<double>> points,
                                           double tol) {
    if (points.empty())
        throw ShapeError("convexity_certificate: needs sample points");
    const int n = nabla0.chart->dim();
    TensorField W = weyl_curvature(nabla0);
    TensorField Y = cotton_york(nabla0);
    for (const auto& x : points) {
        BatchEvaluator ev(x);
        if (max_abs(W, ev) > 1e-8 || max_abs(Y, ev) > 1e-8)
            throw NotFlatError("convexity_certificate: projective class is not flat");
    }

    ConvexityCertificate out;
    WeylSection s = weyl_from_density(sigma, nabla0, points);
    TensorField sym_p = symmetrize(s.rho_s, true, {0, 1});
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& x : points) {
        Eigen::MatrixXd P = eval_matrix(sym_p, x);
        min_eig = std::min(
            min_eig,
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(P).eigenvalues().minCoeff());
    }
    out.rho_positive_definite = min_eig > 1e-8;

    // Fit the constant multiple from the first point: scaling sigma by c
    // scales det H by c^n and the right side by c^{-n-2}.
    const int sign = (n % 2 == 0) ? 1 : -1;
    {
        TensorField H = projective_hessian(sigma, nabla0);
        BatchEvaluator ev(points[0]);
        double det_h = eval_matrix(H, ev).determinant();
        double sv = ev.eval(sigma.component);
        double rhs = sign * std::pow(sv, -(n + 2));
        double ratio = rhs / det_h;
        if (!std::isfinite(ratio) || ratio <= 0.0) {
            out.is_ma_solution = false;
        } else {
            out.scale = std::pow(ratio, 1.0 / (2 * n + 2));
            DensityField scaled = DensityField::make(
                sigma.chart, sigma.weight, sigma.component * out.scale);
            out.is_ma_solution = ma_residual(scaled, sign, nabla0, points).max_residual <= tol;
        }
    }
    try {
        out.minimal_lagrangian_residual = section_residuals(s, points).minimal_residual;
    } catch (const DegenerateSectionError&) {
        out.minimal_lagrangian_residual = 0;
        out.rho_positive_definite = false;
    }
    return out;
}

}  // namespace weylab
