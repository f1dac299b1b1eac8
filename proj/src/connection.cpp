#include "weylab/proj/connection.hpp"

#include <cmath>

#include "weylab/errors.hpp"

namespace weylab {

Connection Connection::from_gamma(const TensorField& gamma) {
    if (!gamma.valid() || gamma.contra() != 1 || gamma.cov() != 2)
        throw ShapeError("connection: coefficients must have valence (1,2)");
    if (!gamma.weight().is_zero())
        throw ShapeError("connection: coefficients carry no density weight");
    return Connection{gamma.chart(), symmetrize(gamma, true, {0, 1})};
}

Connection Connection::flat(ChartPtr chart) {
    TensorField zero(chart, 1, 2);
    return Connection{std::move(chart), std::move(zero)};
}

Connection Connection::levi_civita(const TensorField& metric) {
    if (!metric.valid() || metric.contra() != 0 || metric.cov() != 2)
        throw ShapeError("levi_civita: metric must have valence (0,2)");
    const int n = metric.dim();
    TensorField ginv = inverse_form(metric);
    TensorField dg = partial_derivative(metric);  // at({a,i,j}) = d_a g_{ij}
    TensorField gamma = TensorField::build(
        metric.chart(), 1, 2, Rational(0), [&](std::span<const int> idx) {
            const int k = idx[0], i = idx[1], j = idx[2];
            ScalarField acc = ScalarField::constant(n, 0.0);
            for (int l = 0; l < n; ++l)
                acc = acc + ginv.at({k, l}) *
                                (dg.at({i, j, l}) + dg.at({j, i, l}) - dg.at({l, i, j}));
            return acc * 0.5;
        });
    return Connection{metric.chart(), std::move(gamma)};
}

TensorField curvature(const Connection& conn) {
    const TensorField& g = conn.gamma;
    const int n = g.dim();
    TensorField dg = partial_derivative(g);  // at({k,a,i,j}) = d_a Gamma^k_{ij}
    return TensorField::build(conn.chart, 1, 3, Rational(0), [&](std::span<const int> idx) {
        const int k = idx[0], i = idx[1], j = idx[2], l = idx[3];
        ScalarField acc = dg.at({k, i, j, l}) - dg.at({k, j, i, l});
        for (int m = 0; m < n; ++m)
            acc = acc + g.at({k, i, m}) * g.at({m, j, l}) -
                  g.at({k, j, m}) * g.at({m, i, l});
        return acc;
    });
}

TensorField ricci(const Connection& conn) {
    // Ric_{jl} = R_{ij}{}^i{}_l: contract the output slot with covariant slot 0.
    return contract(curvature(conn), 0, 0);
}

TensorField rho(const Connection& conn) {
    const int n = conn.chart->dim();
    TensorField ric = ricci(conn);
    TensorField sym = symmetrize(ric, true, {0, 1});
    TensorField skew = alternate(ric, true, {0, 1});
    return sym * (-1.0 / (n - 1)) + skew * (-1.0 / (n + 1));
}

TensorField weyl_curvature(const Connection& conn) {
    const int n = conn.chart->dim();
    TensorField R = curvature(conn);
    TensorField P = rho(conn);
    TensorField Pskew = alternate(P, true, {0, 1});
    return TensorField::build(conn.chart, 1, 3, Rational(0), [&](std::span<const int> idx) {
        const int k = idx[0], i = idx[1], j = idx[2], l = idx[3];
        ScalarField acc = R.at(idx);
        if (k == i) acc = acc + P.at({j, l});
        if (k == j) acc = acc - P.at({i, l});
        if (k == l) acc = acc - 2.0 * Pskew.at({i, j});
        (void)n;
        return acc;
    });
}

TensorField cotton_york(const Connection& conn) {
    TensorField dP = covariant_derivative(rho(conn), conn.gamma);  // at({a,j,k})
    return TensorField::build(conn.chart, 0, 3, Rational(0), [&](std::span<const int> idx) {
        const int i = idx[0], j = idx[1], k = idx[2];
        return dP.at({i, j, k}) - dP.at({j, i, k});
    });
}

Connection projective_change(const Connection& conn, const TensorField& upsilon) {
    if (!upsilon.valid() || upsilon.contra() != 0 || upsilon.cov() != 1)
        throw ShapeError("projective_change: Upsilon must be a one-form");
    if (!upsilon.weight().is_zero())
        throw ShapeError("projective_change: Upsilon must have weight zero");
    TensorField gamma = TensorField::build(
        conn.chart, 1, 2, Rational(0), [&](std::span<const int> idx) {
            const int k = idx[0], i = idx[1], j = idx[2];
            ScalarField acc = conn.gamma.at(idx);
            if (k == i) acc = acc + upsilon.at({j});
            if (k == j) acc = acc + upsilon.at({i});
            return acc;
        });
    return Connection{conn.chart, std::move(gamma)};
}

double density_change_check(const Connection& conn, const TensorField& upsilon,
                            const ScalarField& sigma, Rational w,
                            std::span<const std::vector<double>> points) {
    Connection hat = projective_change(conn, upsilon);
    TensorField dens = TensorField::scalar(conn.chart, sigma, w);
    TensorField lhs = covariant_derivative(dens, hat.gamma);
    TensorField rhs = covariant_derivative(dens, conn.gamma) +
                      upsilon * TensorField::scalar(conn.chart, sigma * w.as_double(), w);
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, max_abs(lhs - rhs, p));
    return worst;
}

TensorField klein_ball_metric(const ChartPtr& chart) {
    const int n = chart->dim();
    ScalarField u2 = ScalarField::constant(n, 1.0);
    for (int i = 0; i < n; ++i) {
        ScalarField xi = ScalarField::coordinate(n, i);
        u2 = u2 - xi * xi;
    }
    return TensorField::build(chart, 0, 2, Rational(0), [&](std::span<const int> idx) {
        const int i = idx[0], j = idx[1];
        ScalarField xi = ScalarField::coordinate(n, i);
        ScalarField xj = ScalarField::coordinate(n, j);
        ScalarField f = xi * xj / (u2 * u2);
        if (i == j) f = f + 1.0 / u2;
        return f;
    });
}

}  // namespace weylab
