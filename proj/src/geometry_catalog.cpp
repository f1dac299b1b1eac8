#include "weylab/cli/geometry.hpp"

#include <random>

#include "weylab/errors.hpp"
#include "weylab/field/parser.hpp"

namespace weylab {

namespace {

// Depth-first walk over monomials with nondecreasing variable lists; the
// visit order is part of the generator's documented contract.
void add_monomials(ScalarField& f, const ScalarField& prefix, int first_var, int dim,
                   int remaining_degree, std::mt19937_64& rng,
                   std::uniform_real_distribution<double>& dist) {
    if (remaining_degree == 0) return;
    for (int v = first_var; v < dim; ++v) {
        ScalarField m = prefix * ScalarField::coordinate(dim, v);
        f = f + dist(rng) * m;
        add_monomials(f, m, v, dim, remaining_degree - 1, rng, dist);
    }
}

}  // namespace

Connection random_poly_connection(int dim, int degree, unsigned seed) {
    if (degree < 0) throw ShapeError("random_poly: degree must be non-negative");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.35, 0.35);
    auto chart = Chart::make(dim);
    TensorField gamma(chart, 1, 2);
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                ScalarField f = ScalarField::constant(dim, dist(rng));
                add_monomials(f, ScalarField::constant(dim, 1.0), 0, dim, degree, rng,
                              dist);
                gamma.at({k, i, j}) = f;
                gamma.at({k, j, i}) = f;
            }
    return Connection::from_gamma(gamma);
}

TensorField random_poly_oneform(const ChartPtr& chart, int degree, unsigned seed) {
    const int dim = chart->dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    TensorField psi(chart, 0, 1);
    for (int i = 0; i < dim; ++i) {
        ScalarField f = ScalarField::constant(dim, dist(rng));
        add_monomials(f, ScalarField::constant(dim, 1.0), 0, dim, degree, rng, dist);
        psi.at({i}) = f;
    }
    return psi;
}

std::vector<std::string> catalog_kinds() {
    return {"flat", "klein_ball", "levi_civita", "explicit", "random_poly"};
}

Geometry catalog_geometry(const GeometrySpec& spec) {
    if (spec.dim < 2) throw ShapeError("geometry: dimension must be at least 2");
    Geometry g;
    if (spec.kind == "flat") {
        g.conn = Connection::flat(Chart::make(spec.dim));
    } else if (spec.kind == "klein_ball") {
        auto chart = Chart::make(spec.dim, Chart::Domain::UnitBall);
        g.metric = klein_ball_metric(chart);
        g.conn = Connection::levi_civita(*g.metric);
    } else if (spec.kind == "levi_civita") {
        const int n = spec.dim;
        if (static_cast<int>(spec.metric.size()) != n * n)
            throw ParseError("geometry: levi_civita needs dim*dim metric expressions");
        auto chart = Chart::make(n);
        TensorField m(chart, 0, 2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m.at({i, j}) = parse_field(spec.metric[i * n + j], n);
        std::vector<double> origin(n, 0.0);
        if (std::abs(eval_matrix(m, origin).determinant()) < 1e-10)
            throw DegenerateMetricError("geometry: metric singular at the origin");
        g.metric = m;
        g.conn = Connection::levi_civita(m);
    } else if (spec.kind == "explicit") {
        const int n = spec.dim;
        if (static_cast<int>(spec.gamma.size()) != n * n * n)
            throw ParseError("geometry: explicit needs dim^3 coefficient expressions");
        auto chart = Chart::make(n);
        TensorField gamma(chart, 1, 2);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    gamma.at({k, i, j}) =
                        parse_field(spec.gamma[(k * n + i) * n + j], n);
        g.conn = Connection::from_gamma(gamma);
    } else if (spec.kind == "random_poly") {
        g.conn = random_poly_connection(spec.dim, spec.degree, spec.seed);
    } else {
        throw ParseError("geometry: unknown kind '" + spec.kind + "'");
    }
    return g;
}

}  // namespace weylab
