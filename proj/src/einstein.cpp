#include <cmath>

#include "weylab/bundle/bundle.hpp"
#include "weylab/errors.hpp"

namespace weylab {

namespace {

// Gauss-Jordan inverse of a matrix of jets (partial pivoting on the values).
std::vector<std::vector<Jet>> jet_matrix_inverse(std::vector<std::vector<Jet>> m) {
    const int N = static_cast<int>(m.size());
    const JetLayout& L = m[0][0].layout();
    std::vector<std::vector<Jet>> inv(N, std::vector<Jet>(N));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            inv[i][j] = Jet::constant(L, i == j ? 1.0 : 0.0);
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(m[r][col].value()) > std::abs(m[piv][col].value())) piv = r;
        if (m[piv][col].value() == 0.0)
            throw SingularFormError("jet matrix inverse: singular matrix");
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        Jet rec = m[col][col].reciprocal();
        for (int j = 0; j < N; ++j) {
            m[col][j] = m[col][j] * rec;
            inv[col][j] = inv[col][j] * rec;
        }
        for (int r = 0; r < N; ++r) {
            if (r == col || m[r][col].value() == 0.0) continue;
            Jet f = m[r][col];
            for (int j = 0; j < N; ++j) {
                m[r][j] -= f * m[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

}  // namespace

Eigen::MatrixXd ricci_from_metric_jets(const std::vector<std::vector<Jet>>& h2jets) {
    const int N = static_cast<int>(h2jets.size());
    const JetLayout& L2 = h2jets[0][0].layout();
    if (L2.order() < 2)
        throw OrderError("ricci_from_metric_jets: needs order-2 jets of the metric");

    // Order-1 jets of the inverse metric and of the Christoffel symbols.
    std::vector<std::vector<Jet>> h1(N, std::vector<Jet>(N));
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) h1[a][b] = h2jets[a][b].truncated(1);
    std::vector<std::vector<Jet>> hinv = jet_matrix_inverse(h1);

    // dh[c][a][b] = d_c h_ab as an order-1 jet.
    std::vector<std::vector<std::vector<Jet>>> dh(
        N, std::vector<std::vector<Jet>>(N, std::vector<Jet>(N)));
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) dh[c][a][b] = h2jets[a][b].derivative(c);

    std::vector<std::vector<std::vector<Jet>>> gam(
        N, std::vector<std::vector<Jet>>(N, std::vector<Jet>(N)));
    for (int c = 0; c < N; ++c)
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                const JetLayout& L1 = hinv[0][0].layout();
                Jet s(L1);
                for (int d = 0; d < N; ++d)
                    s += hinv[c][d] * (dh[a][b][d] + dh[b][a][d] - dh[d][a][b]);
                gam[c][a][b] = s * 0.5;
            }

    // Ric_ab = d_c Gamma^c_ab - d_a Gamma^c_cb + Gamma^c_cd Gamma^d_ab
    //                                          - Gamma^c_ad Gamma^d_cb
    Eigen::MatrixXd ric(N, N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            double v = 0;
            for (int c = 0; c < N; ++c) {
                v += gam[c][a][b].derivative(c).value();
                v -= gam[c][c][b].derivative(a).value();
                for (int d = 0; d < N; ++d)
                    v += gam[c][c][d].value() * gam[d][a][b].value() -
                         gam[c][a][d].value() * gam[d][c][b].value();
            }
            ric(a, b) = v;
        }
    return ric;
}

EinsteinReport einstein_and_closedness(const BundleSpace& bs,
                                       std::span<const std::vector<double>> points) {
    const int N = 2 * bs.n();
    if (points.size() < 3)
        throw ShapeError("einstein_and_closedness: need at least 3 sample points");
    TensorField h = bundle_metric(bs);
    TensorField om = bundle_two_form(bs);
    TensorField dom = partial_derivative(om);  // at({a,b,c}) = d_a Omega_bc

    EinsteinReport rep;
    rep.einstein_residual = 0;
    rep.d_omega_residual = 0;
    for (const auto& p : points) {
        if (!bs.total->contains(p))
            throw DomainError("einstein_and_closedness: point outside domain");
        BatchEvaluator ev(p);
        std::vector<std::vector<Jet>> jets(N, std::vector<Jet>(N));
        Eigen::MatrixXd H(N, N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                jets[a][b] = ev.eval_jet(h.at({a, b}), 2);
                H(a, b) = jets[a][b].value();
            }
        Eigen::MatrixXd ric = ricci_from_metric_jets(jets);
        double lambda = (H.inverse() * ric).trace() / N;
        rep.lambda.push_back(lambda);
        double hmax = H.cwiseAbs().maxCoeff();
        rep.einstein_residual =
            std::max(rep.einstein_residual, (ric - lambda * H).cwiseAbs().maxCoeff() / hmax);
        // exterior derivative over all coordinate triples
        for (int a = 0; a < N; ++a)
            for (int b = a + 1; b < N; ++b)
                for (int c = b + 1; c < N; ++c) {
                    double v = ev.eval(dom.at({a, b, c})) - ev.eval(dom.at({b, a, c})) +
                               ev.eval(dom.at({c, a, b}));
                    rep.d_omega_residual = std::max(rep.d_omega_residual, std::abs(v));
                }
    }
    return rep;
}

}  // namespace weylab
