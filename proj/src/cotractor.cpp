#include "weylab/tractor/cotractor.hpp"

#include <cmath>

#include "weylab/errors.hpp"

namespace weylab {

CotractorField CotractorField::make(Connection rep, TensorField sigma, TensorField mu) {
    if (!sigma.valid() || sigma.rank() != 0 || sigma.weight() != Rational(1))
        throw ShapeError("cotractor: sigma must be a weight-1 density scalar");
    if (!mu.valid() || mu.contra() != 0 || mu.cov() != 1 || mu.weight() != Rational(1))
        throw ShapeError("cotractor: mu must be a weight-1 covector field");
    if (sigma.dim() != rep.chart->dim() || mu.dim() != rep.chart->dim())
        throw ShapeError("cotractor: components must live on the representative's chart");
    return CotractorField{std::move(rep), std::move(sigma), std::move(mu)};
}

CotractorField change_representative(const CotractorField& t, const TensorField& upsilon) {
    Connection rep2 = projective_change(t.rep, upsilon);
    // weight-0 upsilon times weight-1 sigma keeps the slot weights aligned
    TensorField mu2 = t.mu + TensorField::build(t.rep.chart, 0, 1, Rational(1),
                                                [&](std::span<const int> idx) {
        return upsilon.at({idx[0]}) * t.sigma.at({});
    });
    return CotractorField{std::move(rep2), t.sigma, std::move(mu2)};
}

CotractorDerivative cotractor_derivative(const CotractorField& t) {
    TensorField p = rho(t.rep);
    CotractorDerivative d;
    d.d_sigma = covariant_derivative(t.sigma, t.rep.gamma) - t.mu;
    d.d_mu = covariant_derivative(t.mu, t.rep.gamma) - tensor_product(p, t.sigma);
    return d;
}

CotractorField bgg_split(const DensityField& sigma, const Connection& rep) {
    TensorField st = sigma.as_tensor();
    return CotractorField::make(rep, st, covariant_derivative(st, rep.gamma));
}

TractorCurvatureSample tractor_curvature(const Connection& rep,
                                         std::span<const std::vector<double>> points) {
    const int n = rep.chart->dim();
    TensorField p = rho(rep);

    // Curvature on the frame (1,0), (0,e_k) of constant splitting components.
    // For t with first derivative (s_a, m_ab), the second applies the same
    // shape with the extra covector slot carried along:
    //   (grad^T_i grad^T_j t)_sigma = grad_i s_j - m_ij
    //   (grad^T_i grad^T_j t)_mu_b  = grad_i m_jb - P_ib s_j
    // and kappa antisymmetrizes in (i, j).
    struct Kappa {
        TensorField sig;  // (0,2): kappa(e_i,e_j) sigma-output
        TensorField mu;   // (0,3): {i,j,b}
    };
    auto curvature_of = [&](const TensorField& sig0, const TensorField& mu0) {
        TensorField s = covariant_derivative(sig0, rep.gamma) - mu0;
        TensorField m = covariant_derivative(mu0, rep.gamma) - tensor_product(p, sig0);
        TensorField ds = covariant_derivative(s, rep.gamma);  // {i,j}
        TensorField dm = covariant_derivative(m, rep.gamma);  // {i,a,b}
        Kappa k;
        k.sig = TensorField::build(rep.chart, 0, 2, Rational(1),
                                   [&](std::span<const int> idx) {
            const int i = idx[0], j = idx[1];
            // the mu-part of (grad^T_j t) contracted with direction i is m_{ji}
            return ds.at({i, j}) - m.at({j, i}) - (ds.at({j, i}) - m.at({i, j}));
        });
        k.mu = TensorField::build(rep.chart, 0, 3, Rational(1),
                                  [&](std::span<const int> idx) {
            const int i = idx[0], j = idx[1], b = idx[2];
            return dm.at({i, j, b}) - p.at({i, b}) * s.at({j}) -
                   (dm.at({j, i, b}) - p.at({j, b}) * s.at({i}));
        });
        return k;
    };

    std::vector<Kappa> frame;
    {
        TensorField one = TensorField::scalar(
            rep.chart, ScalarField::constant(n, 1.0), Rational(1));
        TensorField zero_mu(rep.chart, 0, 1, Rational(1));
        frame.push_back(curvature_of(one, zero_mu));
        TensorField zero_sig =
            TensorField::scalar(rep.chart, ScalarField::constant(n, 0.0), Rational(1));
        for (int k = 0; k < n; ++k) {
            TensorField mu(rep.chart, 0, 1, Rational(1));
            mu.at({k}) = ScalarField::constant(n, 1.0);
            frame.push_back(curvature_of(zero_sig, mu));
        }
    }

    TractorCurvatureSample out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.planes.emplace_back(i, j);
    for (const auto& x : points) {
        BatchEvaluator ev(x);
        std::vector<Eigen::MatrixXd> per_plane;
        for (auto [i, j] : out.planes) {
            Eigen::MatrixXd k(n + 1, n + 1);
            for (int col = 0; col <= n; ++col) {
                k(0, col) = ev.eval(frame[col].sig.at({i, j}));
                for (int b = 0; b < n; ++b)
                    k(1 + b, col) = ev.eval(frame[col].mu.at({i, j, b}));
            }
            per_plane.push_back(std::move(k));
        }
        out.kappa.push_back(std::move(per_plane));
    }
    return out;
}

CotractorField line_from_section(const WeylSection& s) {
    const int n = s.n();
    TensorField sigma = TensorField::scalar(
        s.nabla0.chart, ScalarField::constant(n, 1.0), Rational(1));
    return CotractorField::make(s.nabla0, sigma, -s.psi * sigma);
}

TensorField section_from_line(const CotractorField& t,
                              std::span<const std::vector<double>> check_points) {
    for (const auto& x : check_points)
        if (std::abs(t.sigma.at({}).eval(x)) < 1e-12)
            throw TransversalityError(
                "section_from_line: line lies in the sigma = 0 hyperplane");
    ScalarField guarded = guard_nonzero(t.sigma.at({}), 1e-12,
                                        "section_from_line: sigma vanishes");
    return TensorField::build(t.rep.chart, 0, 1, Rational(0),
                              [&](std::span<const int> idx) {
        return -t.mu.at({idx[0]}) / guarded;
    });
}

}  // namespace weylab
