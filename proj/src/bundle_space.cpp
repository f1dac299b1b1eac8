#include "weylab/bundle/bundle.hpp"

#include <numeric>

#include "weylab/errors.hpp"

namespace weylab {

namespace {

std::vector<int> base_var_map(int n) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    return m;
}

}  // namespace

ScalarField lift_to_total(const BundleSpace& bs, const ScalarField& f) {
    return f.embed(2 * bs.n(), base_var_map(bs.n()));
}

TensorField lift_to_total(const BundleSpace& bs, const TensorField& t) {
    const int n = bs.n();
    if (t.dim() != n) throw ShapeError("lift_to_total: tensor not on the base chart");
    return TensorField::build(bs.total, t.contra(), t.cov(), t.weight(),
                              [&](std::span<const int> idx) {
        for (int v : idx)
            if (v >= n) return ScalarField::constant(2 * n, 0.0);
        return t.at(idx).embed(2 * n, base_var_map(n));
    });
}

BundleSpace BundleSpace::make(const Connection& nabla0) {
    const int n = nabla0.chart->dim();
    Chart::Domain dom = nabla0.chart->domain() == Chart::Domain::Whole
                            ? Chart::Domain::Whole
                            : Chart::Domain::BaseUnitBall;
    BundleSpace bs;
    bs.base = nabla0.chart;
    bs.nabla0 = nabla0;
    bs.total = Chart::make(2 * n, dom);

    TensorField P0 = lift_to_total(bs, rho(nabla0));
    TensorField G0 = lift_to_total(bs, nabla0.gamma);
    bs.A = TensorField::build(bs.total, 0, 2, Rational(0), [&](std::span<const int> idx) {
        const int i = idx[0], j = idx[1];
        if (i >= n || j >= n) return ScalarField::constant(2 * n, 0.0);
        ScalarField psi_i = ScalarField::coordinate(2 * n, n + i);
        ScalarField psi_j = ScalarField::coordinate(2 * n, n + j);
        ScalarField acc = P0.at({i, j}) - psi_i * psi_j;
        for (int k = 0; k < n; ++k)
            acc = acc - G0.at({k, i, j}) * ScalarField::coordinate(2 * n, n + k);
        return acc;
    });
    TensorField G0f = G0;
    bs.gamma_psi = TensorField::build(bs.total, 1, 2, Rational(0),
                                      [&](std::span<const int> idx) {
        const int k = idx[0], i = idx[1], j = idx[2];
        if (k >= n || i >= n || j >= n) return ScalarField::constant(2 * n, 0.0);
        ScalarField acc = G0f.at(idx);
        if (k == i) acc = acc + ScalarField::coordinate(2 * n, n + j);
        if (k == j) acc = acc + ScalarField::coordinate(2 * n, n + i);
        return acc;
    });
    return bs;
}

TensorField frame_vector(const BundleSpace& bs, int a) {
    const int n = bs.n();
    if (a < 0 || a >= 2 * n) throw ShapeError("frame_vector: index out of range");
    TensorField v(bs.total, 1, 0);
    v.at({a}) = ScalarField::constant(2 * n, 1.0);
    if (a < n)
        for (int j = 0; j < n; ++j) v.at({n + j}) = -bs.A.at({a, j});
    return v;
}

ScalarField frame_derivative(const BundleSpace& bs, const ScalarField& f, int a) {
    const int n = bs.n();
    if (a >= n) return f.derivative(a);
    ScalarField acc = f.derivative(a);
    for (int j = 0; j < n; ++j) acc = acc - bs.A.at({a, j}) * f.derivative(n + j);
    return acc;
}

TensorField to_frame_coeffs(const BundleSpace& bs, const TensorField& coord_vec) {
    const int n = bs.n();
    if (coord_vec.contra() != 1 || coord_vec.cov() != 0 || coord_vec.dim() != 2 * n)
        throw ShapeError("to_frame_coeffs: expects a (1,0) field on the total chart");
    TensorField r(bs.total, 1, 0);
    for (int i = 0; i < n; ++i) r.at({i}) = coord_vec.at({i});
    for (int j = 0; j < n; ++j) {
        ScalarField acc = coord_vec.at({n + j});
        for (int i = 0; i < n; ++i) acc = acc + bs.A.at({i, j}) * coord_vec.at({i});
        r.at({n + j}) = acc;
    }
    return r;
}

TensorField to_coord_vec(const BundleSpace& bs, const TensorField& frame_coeffs) {
    const int n = bs.n();
    if (frame_coeffs.contra() != 1 || frame_coeffs.cov() != 0 ||
        frame_coeffs.dim() != 2 * n)
        throw ShapeError("to_coord_vec: expects a (1,0) field on the total chart");
    TensorField r(bs.total, 1, 0);
    for (int i = 0; i < n; ++i) r.at({i}) = frame_coeffs.at({i});
    for (int j = 0; j < n; ++j) {
        ScalarField acc = frame_coeffs.at({n + j});
        for (int i = 0; i < n; ++i) acc = acc - bs.A.at({i, j}) * frame_coeffs.at({i});
        r.at({n + j}) = acc;
    }
    return r;
}

TensorField coord_bracket(const TensorField& X, const TensorField& Y) {
    if (X.contra() != 1 || X.cov() != 0 || Y.contra() != 1 || Y.cov() != 0)
        throw ShapeError("coord_bracket: expects (1,0) vector fields");
    if (X.chart() != Y.chart()) throw ShapeError("coord_bracket: fields on different charts");
    const int d = X.dim();
    TensorField r(X.chart(), 1, 0);
    for (int c = 0; c < d; ++c) {
        ScalarField acc = ScalarField::constant(d, 0.0);
        for (int a = 0; a < d; ++a)
            acc = acc + X.at({a}) * Y.at({c}).derivative(a) -
                  Y.at({a}) * X.at({c}).derivative(a);
        r.at({c}) = acc;
    }
    return r;
}

TensorField bundle_two_form(const BundleSpace& bs) {
    const int n = bs.n();
    return TensorField::build(bs.total, 0, 2, Rational(0), [&](std::span<const int> idx) {
        const int a = idx[0], b = idx[1];
        if (a < n && b < n) return bs.A.at({b, a}) - bs.A.at({a, b});
        if (a < n && b >= n)
            return ScalarField::constant(2 * n, a == b - n ? 1.0 : 0.0);
        if (a >= n && b < n)
            return ScalarField::constant(2 * n, a - n == b ? -1.0 : 0.0);
        return ScalarField::constant(2 * n, 0.0);
    });
}

TensorField bundle_metric(const BundleSpace& bs) {
    const int n = bs.n();
    return TensorField::build(bs.total, 0, 2, Rational(0), [&](std::span<const int> idx) {
        const int a = idx[0], b = idx[1];
        if (a < n && b < n) return bs.A.at({a, b}) + bs.A.at({b, a});
        if (a < n && b >= n)
            return ScalarField::constant(2 * n, a == b - n ? 1.0 : 0.0);
        if (a >= n && b < n)
            return ScalarField::constant(2 * n, a - n == b ? 1.0 : 0.0);
        return ScalarField::constant(2 * n, 0.0);
    });
}

TensorField fiber_gamma(const BundleSpace& bs) { return bs.gamma_psi; }

}  // namespace weylab
