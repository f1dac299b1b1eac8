#include "weylab/section/section.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "weylab/errors.hpp"

namespace weylab {

namespace {

std::string point_string(std::span<const double> x) {
    std::string s = "(";
    for (size_t i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(x[i]);
    }
    return s + ")";
}

// Inverse of sym Rho as a symbolic (2,0) field; singularity surfaces at
// evaluation via the determinant guard.
TensorField sym_rho_inverse(const WeylSection& s) {
    return inverse_form(symmetrize(s.rho_s, true, {0, 1}));
}

// Throws with the offending point if the section fails the Lagrangian or
// non-degeneracy requirement at any of the samples.
void require_lagrangian_nondegenerate(const WeylSection& s,
                                      std::span<const std::vector<double>> pts,
                                      double zero_tol, double det_tol) {
    TensorField skew = alternate(s.rho_s, true, {0, 1});
    TensorField sym = symmetrize(s.rho_s, true, {0, 1});
    for (const auto& x : pts) {
        if (max_abs(skew, x) > zero_tol)
            throw NonLagrangianError("section: Rho not symmetric at " + point_string(x));
        if (std::abs(eval_matrix(sym, x).determinant()) < det_tol)
            throw DegenerateSectionError("section: sym Rho singular at " + point_string(x));
    }
}

}  // namespace

WeylSection WeylSection::make(const Connection& nabla0, const TensorField& psi) {
    if (psi.contra() != 0 || psi.cov() != 1 || psi.dim() != nabla0.chart->dim())
        throw ShapeError("WeylSection: psi must be a covector field on the base chart");
    WeylSection s;
    s.nabla0 = nabla0;
    s.psi = psi;
    s.nabla_s = projective_change(nabla0, psi);
    s.rho_s = rho(s.nabla_s);
    return s;
}

std::vector<double> WeylSection::graph_point(std::span<const double> x) const {
    const int d = n();
    if (static_cast<int>(x.size()) != d)
        throw ShapeError("WeylSection: base point dimension mismatch");
    std::vector<double> p(2 * d);
    for (int i = 0; i < d; ++i) p[i] = x[i];
    std::vector<double> xv(x.begin(), x.end());
    for (int j = 0; j < d; ++j) p[d + j] = psi.at({j}).eval(xv);
    return p;
}

TensorField lagrangian_section(const Connection& nabla0, const ScalarField& phi) {
    const int n = nabla0.chart->dim();
    TensorField trace = contract(nabla0.gamma, 0, 0);  // Gamma^k_{kj}
    return TensorField::build(nabla0.chart, 0, 1, Rational(0),
                              [&](std::span<const int> idx) {
        const int j = idx[0];
        return phi.derivative(j) - trace.at({j}) * (1.0 / (n + 1));
    });
}

SectionClassification classify_section(const WeylSection& s,
                                       std::span<const std::vector<double>> pts,
                                       double zero_tol, double det_tol) {
    const int n = s.n();
    BundleSpace bs = BundleSpace::make(s.nabla0);
    TensorField omega = bundle_two_form(bs);
    TensorField h = bundle_metric(bs);
    TensorField skew = alternate(s.rho_s, true, {0, 1});
    TensorField sym = symmetrize(s.rho_s, true, {0, 1});

    SectionClassification out;
    out.min_det_sym = std::numeric_limits<double>::infinity();
    for (const auto& x : pts) {
        std::vector<double> p = s.graph_point(x);
        // Graph Jacobian: columns are pushforwards of the base frame.
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, n);
        BatchEvaluator evx(x);
        for (int i = 0; i < n; ++i) {
            J(i, i) = 1.0;
            for (int k = 0; k < n; ++k)
                J(n + k, i) = evx.eval_jet(s.psi.at({k}), 1).derivative(i).value();
        }
        Eigen::MatrixXd Om = eval_matrix(omega, p);
        Eigen::MatrixXd H = eval_matrix(h, p);
        Eigen::MatrixXd P = eval_matrix(s.rho_s, x);
        Eigen::MatrixXd pull_omega = J.transpose() * Om * J;
        Eigen::MatrixXd pull_h = J.transpose() * H * J;
        double r = (pull_omega + (P - P.transpose())).cwiseAbs().maxCoeff();
        r = std::max(r, (pull_h - (P + P.transpose())).cwiseAbs().maxCoeff());
        out.pullback_residual = std::max(out.pullback_residual, r);

        out.max_skew = std::max(out.max_skew, max_abs(skew, x));
        out.min_det_sym =
            std::min(out.min_det_sym, std::abs(eval_matrix(sym, x).determinant()));
    }
    out.lagrangian = out.max_skew <= zero_tol;
    out.nondegenerate = out.min_det_sym >= det_tol;
    return out;
}

SecondFundamentalForms second_fundamental_forms(
    const WeylSection& s, std::span<const std::vector<double>> pts,
    double zero_tol, double det_tol) {
    require_lagrangian_nondegenerate(s, pts, zero_tol, det_tol);
    const int n = s.n();
    TensorField pinv = sym_rho_inverse(s);
    TensorField grad_p = covariant_derivative(s.rho_s, s.nabla_s.gamma);  // {i,j,a}

    SecondFundamentalForms out;
    // -1/2 P^{ka} grad_i P_{ja}: product slots (k,a;i,j,a'), contract a vs a'.
    out.ii_d = contract(tensor_product(pinv, grad_p), 1, 2) * -0.5;
    TensorField combo = TensorField::build(s.nabla0.chart, 0, 3, Rational(0),
                                           [&](std::span<const int> idx) {
        const int i = idx[0], j = idx[1], a = idx[2];
        return grad_p.at({i, j, a}) + grad_p.at({j, i, a}) - grad_p.at({a, i, j});
    });
    out.ii_h = contract(tensor_product(pinv, combo), 1, 2) * -0.5;
    return out;
}

std::vector<std::vector<Eigen::MatrixXd>> extrinsic_ii_oracle(
    const WeylSection& s, AmbientConnection ambient,
    std::span<const std::vector<double>> pts) {
    require_lagrangian_nondegenerate(s, pts, 1e-8, 1e-6);
    const int n = s.n();
    const int N = 2 * n;
    BundleSpace bs = BundleSpace::make(s.nabla0);
    TensorField sym = symmetrize(s.rho_s, true, {0, 1});

    std::vector<std::vector<Eigen::MatrixXd>> out;
    for (const auto& x : pts) {
        std::vector<double> p = s.graph_point(x);
        std::vector<Eigen::MatrixXd> gam =
            ambient == AmbientConnection::CanonicalD
                ? d_coordinate_coefficients(bs, p)
                : levi_civita_h(bs, p).from_metric_jets;

        // 2-jets of psi at x: first and second raw partials.
        BatchEvaluator evx(x);
        Eigen::MatrixXd dpsi(n, n);  // dpsi(k,i) = d_i psi_k
        std::vector<Eigen::MatrixXd> ddpsi(n, Eigen::MatrixXd(n, n));
        for (int k = 0; k < n; ++k) {
            Jet j2 = evx.eval_jet(s.psi.at({k}), 2);
            for (int i = 0; i < n; ++i) {
                Jet di = j2.derivative(i);
                dpsi(k, i) = di.value();
                for (int j = 0; j < n; ++j) ddpsi[k](i, j) = di.derivative(j).value();
            }
        }
        // Pushed tangent frames xi_i in coordinates.
        Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(N, n);
        for (int i = 0; i < n; ++i) {
            xi(i, i) = 1.0;
            for (int k = 0; k < n; ++k) xi(n + k, i) = dpsi(k, i);
        }
        Eigen::MatrixXd A = Eigen::MatrixXd(n, n);
        {
            BatchEvaluator evp(p);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) A(i, j) = evp.eval(bs.A.at({i, j}));
        }
        Eigen::MatrixXd P = eval_matrix(sym, x);
        Eigen::MatrixXd Pinv = P.inverse();

        std::vector<Eigen::MatrixXd> ii(n, Eigen::MatrixXd(n, n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                // Ambient derivative of the extended frame X_j along xi_i: the
                // extension's coefficients depend on x only, so the transport
                // term is the second jet of psi.
                Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
                for (int k = 0; k < n; ++k) v[n + k] = ddpsi[k](i, j);
                for (int c = 0; c < N; ++c)
                    v[c] += xi.col(i).dot(gam[c] * xi.col(j));
                // Adapted-frame split, then the h-orthogonal normal part.
                Eigen::VectorXd base = v.head(n);
                Eigen::VectorXd alpha = v.tail(n) + A.transpose() * base;
                Eigen::VectorXd eta = 0.5 * (base - Pinv * alpha);
                for (int k = 0; k < n; ++k) ii[k](i, j) = eta[k];
            }
        out.push_back(std::move(ii));
    }
    return out;
}

SectionResiduals section_residuals(const WeylSection& s,
                                   std::span<const std::vector<double>> pts,
                                   double det_tol) {
    const int n = s.n();
    TensorField sym = symmetrize(s.rho_s, true, {0, 1});
    for (const auto& x : pts)
        if (std::abs(eval_matrix(sym, x).determinant()) < det_tol)
            throw DegenerateSectionError("section: sym Rho singular at " + point_string(x));

    TensorField pinv = sym_rho_inverse(s);
    TensorField grad_p = covariant_derivative(s.rho_s, s.nabla_s.gamma);
    // M_i = P^{ab} (2 grad_a P_{bi} - grad_i P_{ab})
    TensorField m = TensorField::build(s.nabla0.chart, 0, 1, Rational(0),
                                       [&](std::span<const int> idx) {
        const int i = idx[0];
        ScalarField acc = ScalarField::constant(n, 0.0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                acc = acc + pinv.at({a, b}) *
                            (2.0 * grad_p.at({a, b, i}) - grad_p.at({i, a, b}));
        return acc;
    });

    SectionResiduals out;
    for (const auto& x : pts) {
        BatchEvaluator ev(x);
        double mi = max_abs(m, ev);
        out.minimal_by_point.push_back(mi);
        out.minimal_residual = std::max(out.minimal_residual, mi);
        out.totally_geodesic_residual =
            std::max(out.totally_geodesic_residual, max_abs(grad_p, ev));
        // Mean curvature vector: P^{ij} II_h^k_{ij} = -1/2 P^{ka} M_a,
        // evaluated through the contraction rather than through II to stay
        // cheap; the linkage with II_h is covered by the tests.
        Eigen::MatrixXd Pi = eval_matrix(pinv, ev);
        Eigen::VectorXd mv(n);
        for (int i = 0; i < n; ++i) mv[i] = ev.eval(m.at({i}));
        out.mean_curvature.push_back(-0.5 * Pi * mv);
    }
    return out;
}

}  // namespace weylab
