#include <cmath>

#include "weylab/bundle/bundle.hpp"
#include "weylab/errors.hpp"

namespace weylab {

TensorField canonical_connection_apply(const BundleSpace& bs, const TensorField& W, int a) {
    const int n = bs.n();
    if (W.contra() != 1 || W.cov() != 0 || W.dim() != 2 * n)
        throw ShapeError("canonical connection: expects a (1,0) frame-coefficient field");
    if (a < 0 || a >= 2 * n) throw ShapeError("canonical connection: direction out of range");
    TensorField r(bs.total, 1, 0);
    for (int c = 0; c < 2 * n; ++c) r.at({c}) = frame_derivative(bs, W.at({c}), a);
    if (a < n) {
        TensorField gp = fiber_gamma(bs);
        for (int i = 0; i < n; ++i) {
            ScalarField acc = r.at({i});
            for (int m = 0; m < n; ++m) acc = acc + gp.at({i, a, m}) * W.at({m});
            r.at({i}) = acc;
        }
        for (int j = 0; j < n; ++j) {
            ScalarField acc = r.at({n + j});
            for (int m = 0; m < n; ++m) acc = acc - gp.at({m, a, j}) * W.at({n + m});
            r.at({n + j}) = acc;
        }
    }
    return r;
}

TensorField canonical_connection_along(const BundleSpace& bs, const TensorField& V,
                                       const TensorField& W) {
    const int n = bs.n();
    TensorField r(bs.total, 1, 0);
    for (int a = 0; a < 2 * n; ++a) {
        TensorField da = canonical_connection_apply(bs, W, a);
        for (int c = 0; c < 2 * n; ++c) r.at({c}) = r.at({c}) + V.at({a}) * da.at({c});
    }
    return r;
}

namespace {

// Constant adapted-frame coefficient field for frame vector b.
TensorField frame_unit(const BundleSpace& bs, int b) {
    TensorField e(bs.total, 1, 0);
    e.at({b}) = ScalarField::constant(2 * bs.n(), 1.0);
    return e;
}

Eigen::VectorXd eval_vec(const TensorField& v, BatchEvaluator& ev) {
    Eigen::VectorXd out(v.dim());
    for (int c = 0; c < v.dim(); ++c) out[c] = ev.eval(v.at({c}));
    return out;
}

}  // namespace

TorsionCurvature torsion_curvature_D(const BundleSpace& bs, std::span<const double> p) {
    const int n = bs.n();
    const int N = 2 * n;
    if (!bs.total->contains(p))
        throw DomainError("torsion_curvature_D: point outside the chart domain");
    BatchEvaluator ev(std::vector<double>(p.begin(), p.end()));

    std::vector<TensorField> units, fvecs;
    for (int a = 0; a < N; ++a) {
        units.push_back(frame_unit(bs, a));
        fvecs.push_back(frame_vector(bs, a));
    }
    // First D-derivatives of the constant frame fields.
    std::vector<std::vector<TensorField>> Du(N);
    for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c)
            Du[a].push_back(canonical_connection_apply(bs, units[c], a));

    TorsionCurvature out;
    out.tau.assign(N, std::vector<Eigen::VectorXd>(N));
    out.rho.assign(N, std::vector<Eigen::MatrixXd>(N));
    for (int a = 0; a < N; ++a) {
        for (int b = 0; b < N; ++b) {
            TensorField br = to_frame_coeffs(bs, coord_bracket(fvecs[a], fvecs[b]));
            out.tau[a][b] = eval_vec(Du[a][b] - Du[b][a] - br, ev);
            Eigen::MatrixXd rho(N, N);
            for (int c = 0; c < N; ++c) {
                TensorField second = canonical_connection_apply(bs, Du[b][c], a) -
                                     canonical_connection_apply(bs, Du[a][c], b) -
                                     canonical_connection_along(bs, br, units[c]);
                rho.col(c) = eval_vec(second, ev);
            }
            out.rho[a][b] = rho;
        }
    }
    return out;
}

Eigen::MatrixXd algebraic_bracket_g0(const Eigen::VectorXd& xi, const Eigen::VectorXd& alpha) {
    const int n = static_cast<int>(xi.size());
    if (alpha.size() != n) throw ShapeError("algebraic_bracket_g0: size mismatch");
    const int N = n + 1;
    auto embed_vec = [&](const Eigen::VectorXd& v) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
        m.block(1, 0, n, 1) = v;  // lower-left column
        return m;
    };
    auto embed_cov = [&](const Eigen::VectorXd& a) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
        m.block(0, 1, 1, n) = a.transpose();  // upper-right row
        return m;
    };
    Eigen::MatrixXd g0 = embed_vec(xi) * embed_cov(alpha) - embed_cov(alpha) * embed_vec(xi);
    Eigen::MatrixXd act = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int c = 0; c < n; ++c) {
        Eigen::MatrixXd m = embed_vec(Eigen::VectorXd::Unit(n, c));
        Eigen::MatrixXd comm = g0 * m - m * g0;
        act.block(0, c, n, 1) = comm.block(1, 0, n, 1);
    }
    for (int c = 0; c < n; ++c) {
        Eigen::MatrixXd m = embed_cov(Eigen::VectorXd::Unit(n, c));
        Eigen::MatrixXd comm = g0 * m - m * g0;
        act.block(n, n + c, n, 1) = comm.block(0, 1, 1, n).transpose();
    }
    return act;
}

std::vector<Eigen::MatrixXd> d_coordinate_coefficients(const BundleSpace& bs,
                                                       std::span<const double> p) {
    const int N = 2 * bs.n();
    if (!bs.total->contains(p))
        throw DomainError("d_coordinate_coefficients: point outside domain");
    BatchEvaluator ev(std::vector<double>(p.begin(), p.end()));
    std::vector<Eigen::MatrixXd> gammaD(N, Eigen::MatrixXd(N, N));
    std::vector<TensorField> coord_frames;
    for (int a = 0; a < N; ++a) {
        TensorField e(bs.total, 1, 0);
        e.at({a}) = ScalarField::constant(N, 1.0);
        coord_frames.push_back(to_frame_coeffs(bs, e));
    }
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            TensorField d = to_coord_vec(
                bs, canonical_connection_along(bs, coord_frames[a], coord_frames[b]));
            for (int c = 0; c < N; ++c) gammaD[c](a, b) = ev.eval(d.at({c}));
        }
    return gammaD;
}

LeviCivitaH levi_civita_h(const BundleSpace& bs, std::span<const double> p) {
    const int N = 2 * bs.n();
    if (!bs.total->contains(p)) throw DomainError("levi_civita_h: point outside domain");
    BatchEvaluator ev(std::vector<double>(p.begin(), p.end()));
    TensorField h = bundle_metric(bs);

    // Route (a): Christoffels from first jets of the component matrix.
    Eigen::MatrixXd H(N, N);
    std::vector<Eigen::MatrixXd> dH(N, Eigen::MatrixXd(N, N));
    for (int a = 0; a < N; ++a) {
        for (int b = 0; b < N; ++b) {
            Jet j = ev.eval_jet(h.at({a, b}), 1);
            const JetLayout& L = j.layout();
            H(a, b) = j.value();
            for (int c = 0; c < N; ++c) dH[c](a, b) = j[1 + c];  // raw first partials
        }
    }
    Eigen::MatrixXd Hinv = H.inverse();
    std::vector<Eigen::MatrixXd> route_a(N, Eigen::MatrixXd::Zero(N, N));
    for (int c = 0; c < N; ++c)
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                double s = 0;
                for (int d = 0; d < N; ++d)
                    s += Hinv(c, d) * (dH[a](b, d) + dH[b](a, d) - dH[d](a, b));
                route_a[c](a, b) = 0.5 * s;
            }

    // Route (b): coordinate Christoffels of D, plus the contorsion built from
    // the torsion of D:  h(C(xi,eta),zeta) = -1/2 h(tau(xi,eta),zeta)
    //                                       +1/2 h(tau(xi,zeta),eta)
    //                                       +1/2 h(tau(eta,zeta),xi).
    std::vector<Eigen::MatrixXd> gammaD = d_coordinate_coefficients(bs, p);
    // tau^c_{ab} in coordinates (coordinate brackets vanish)
    auto tau = [&](int c, int a, int b) { return gammaD[c](a, b) - gammaD[c](b, a); };
    auto htau = [&](int a, int b, int d) {  // h(tau(e_a, e_b), e_d)
        double s = 0;
        for (int e = 0; e < N; ++e) s += H(e, d) * tau(e, a, b);
        return s;
    };
    std::vector<Eigen::MatrixXd> contorsion(N, Eigen::MatrixXd(N, N));
    std::vector<Eigen::MatrixXd> route_b(N, Eigen::MatrixXd(N, N));
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            Eigen::VectorXd c_low(N);
            for (int d = 0; d < N; ++d)
                c_low[d] = -0.5 * htau(a, b, d) + 0.5 * htau(a, d, b) + 0.5 * htau(b, d, a);
            Eigen::VectorXd c_up = Hinv * c_low;
            for (int c = 0; c < N; ++c) {
                contorsion[c](a, b) = c_up[c];
                route_b[c](a, b) = gammaD[c](a, b) + c_up[c];
            }
        }

    LeviCivitaH out;
    out.from_metric_jets = std::move(route_a);
    out.from_d_plus_contorsion = std::move(route_b);
    out.contorsion = std::move(contorsion);
    double worst = 0;
    for (int c = 0; c < N; ++c)
        worst = std::max(worst,
                         (out.from_metric_jets[c] - out.from_d_plus_contorsion[c])
                             .cwiseAbs()
                             .maxCoeff());
    out.route_disagreement = worst;
    return out;
}

}  // namespace weylab
