#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "weylab/errors.hpp"
#include "weylab/ma/density.hpp"

using weylab::Chart;
using weylab::ChartPtr;
using weylab::Connection;
using weylab::DensityField;
using weylab::Rational;
using weylab::ScalarField;
using weylab::TensorField;

namespace {

Connection random_poly_connection(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.35, 0.35);
    auto chart = Chart::make(n);
    TensorField gamma = TensorField::build(
        chart, 1, 2, Rational(0), [&](std::span<const int>) {
            ScalarField f = ScalarField::constant(n, dist(rng));
            for (int a = 0; a < n; ++a) {
                ScalarField xa = ScalarField::coordinate(n, a);
                f = f + dist(rng) * xa;
                for (int b = a; b < n; ++b)
                    f = f + dist(rng) * xa * ScalarField::coordinate(n, b);
            }
            return f;
        });
    return Connection::from_gamma(gamma);
}

TensorField random_poly_oneform(const ChartPtr& chart, unsigned seed) {
    const int n = chart->dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    return TensorField::build(chart, 0, 1, Rational(0), [&](std::span<const int>) {
        ScalarField f = ScalarField::constant(n, dist(rng));
        for (int a = 0; a < n; ++a)
            f = f + dist(rng) * ScalarField::coordinate(n, a);
        return f;
    });
}

std::mt19937_64 g_rng(13);

std::vector<std::vector<double>> sample_points(int dim, int count, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    for (auto& p : pts)
        for (auto& v : p) v = dist(g_rng);
    return pts;
}

// sigma = (1 - |x|^2)^{1/2}, the Klein solution density.
DensityField klein_density(const ChartPtr& chart) {
    const int n = chart->dim();
    ScalarField u2 = ScalarField::constant(n, 1.0);
    for (int a = 0; a < n; ++a) {
        ScalarField xa = ScalarField::coordinate(n, a);
        u2 = u2 - xa * xa;
    }
    return DensityField::make(chart, Rational(1), weylab::sqrt(u2));
}

DensityField unit_density(const ChartPtr& chart) {
    return DensityField::make(chart, Rational(1),
                              ScalarField::constant(chart->dim(), 1.0));
}

}  // namespace

TEST_CASE("weyl_from_density: closed forms and the defining property") {
    {
        auto chart = Chart::make(2);
        auto flat = Connection::flat(chart);
        auto s = weylab::weyl_from_density(unit_density(chart), flat);
        std::vector<double> x{0.3, -0.4};
        CHECK(weylab::max_abs(s.psi, x) == doctest::Approx(0.0));
    }
    for (int n : {2, 3}) {
        auto chart = Chart::make(n, Chart::Domain::UnitBall);
        auto flat = Connection::flat(chart);
        auto s = weylab::weyl_from_density(klein_density(chart), flat);
        // Upsilon_i = x_i / (1 - |x|^2); zero at the origin
        for (const auto& x : sample_points(n, 6, 0.45)) {
            double u2 = 1;
            for (double v : x) u2 -= v * v;
            for (int i = 0; i < n; ++i)
                CHECK(s.psi.at({i}).eval(x) ==
                      doctest::Approx(x[i] / u2).epsilon(1e-12));
        }
        std::vector<double> origin(n, 0.0);
        CHECK(weylab::max_abs(s.psi, origin) == doctest::Approx(0.0));
    }
    {
        // grad^s sigma = 0 for arbitrary (sigma, nabla0)
        const int n = 3;
        auto conn = random_poly_connection(n, 31);
        auto chart = conn.chart;
        ScalarField comp = ScalarField::constant(n, 1.2);
        for (int a = 0; a < n; ++a) {
            ScalarField xa = ScalarField::coordinate(n, a);
            comp = comp + 0.2 * xa + 0.1 * xa * ScalarField::coordinate(n, (a + 1) % n);
        }
        DensityField sigma = DensityField::make(chart, Rational(1), comp);
        auto s = weylab::weyl_from_density(sigma, conn);
        TensorField grad_s =
            weylab::covariant_derivative(sigma.as_tensor(), s.nabla_s.gamma);
        for (const auto& x : sample_points(n, 20, 0.5))
            CHECK(weylab::max_abs(grad_s, x) <= 1e-10);
        // constant rescaling leaves the section unchanged
        DensityField sigma3 = DensityField::make(chart, Rational(1), comp * 3.0);
        auto s3 = weylab::weyl_from_density(sigma3, conn);
        TensorField dpsi = s3.psi - s.psi;
        for (const auto& x : sample_points(n, 5, 0.5))
            CHECK(weylab::max_abs(dpsi, x) <= 1e-12);
    }
    {
        auto chart = Chart::make(2);
        DensityField sigma =
            DensityField::make(chart, Rational(1), ScalarField::coordinate(2, 0));
        std::vector<std::vector<double>> pts{{0.0, 0.5}};
        CHECK_THROWS_AS(
            weylab::weyl_from_density(sigma, Connection::flat(chart), pts),
            weylab::ZeroDensityError);
    }
}

TEST_CASE("projective Hessian: closed form, -Rho sigma form, invariance") {
    const int n = 2;
    auto chart = Chart::make(n, Chart::Domain::UnitBall);
    auto flat = Connection::flat(chart);
    DensityField sigma = klein_density(chart);
    TensorField H = weylab::projective_hessian(sigma, flat);
    CHECK(H.weight() == Rational(1));
    for (const auto& x : sample_points(n, 8, 0.45)) {
        double u2 = 1 - x[0] * x[0] - x[1] * x[1];
        double u = std::sqrt(u2);
        Eigen::MatrixXd expect(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                expect(i, j) = -((i == j ? u2 : 0.0) + x[i] * x[j]) / (u2 * u);
        CHECK((weylab::eval_matrix(H, x) - expect).cwiseAbs().maxCoeff() <= 1e-11);
    }
    std::vector<double> origin{0.0, 0.0};
    CHECK((weylab::eval_matrix(H, origin) + Eigen::MatrixXd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);

    // in the sigma-adapted representative, H(sigma) = -Rho^s sigma
    auto s = weylab::weyl_from_density(sigma, flat);
    TensorField H2 = weylab::projective_hessian(sigma, s.nabla_s);
    for (const auto& x : sample_points(n, 8, 0.45)) {
        weylab::BatchEvaluator ev(x);
        Eigen::MatrixXd lhs = weylab::eval_matrix(H2, ev);
        Eigen::MatrixXd rhs =
            -ev.eval(sigma.component) * weylab::eval_matrix(s.rho_s, ev);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((lhs - weylab::eval_matrix(H, ev)).cwiseAbs().maxCoeff() <= 1e-9);
    }

    {
        auto c2 = Chart::make(2);
        TensorField H0 =
            weylab::projective_hessian(unit_density(c2), Connection::flat(c2));
        std::vector<double> x{0.4, 0.1};
        CHECK(weylab::max_abs(H0, x) == doctest::Approx(0.0));
    }

    // representative independence under random projective changes
    const int m = 3;
    auto conn = random_poly_connection(m, 57);
    ScalarField comp = ScalarField::constant(m, 1.0);
    for (int a = 0; a < m; ++a)
        comp = comp + 0.2 * ScalarField::coordinate(m, a) *
                      ScalarField::coordinate(m, (a + 1) % m);
    DensityField sig = DensityField::make(conn.chart, Rational(1), comp);
    TensorField Href = weylab::projective_hessian(sig, conn);
    auto pts = sample_points(m, 5, 0.4);
    for (unsigned seed = 0; seed < 10; ++seed) {
        Connection rep = weylab::projective_change(
            conn, random_poly_oneform(conn.chart, 600 + seed));
        TensorField Hrep = weylab::projective_hessian(sig, rep);
        TensorField diff = Hrep - Href;
        for (const auto& x : pts) CHECK(weylab::max_abs(diff, x) <= 1e-9);
    }
}

TEST_CASE("determinant equation: Klein solves it, constants do not") {
    for (int n : {2, 3}) {
        auto chart = Chart::make(n, Chart::Domain::UnitBall);
        auto flat = Connection::flat(chart);
        auto pts = sample_points(n, 20, 0.45);
        int sign = (n % 2 == 0) ? 1 : -1;
        auto rep = weylab::ma_residual(klein_density(chart), sign, flat, pts);
        CHECK(rep.max_residual <= 1e-10);
        CHECK(rep.det_rho_parallel_residual <= 1e-9);
        CHECK(rep.det_identity_residual <= 1e-9);
    }
    {
        auto chart = Chart::make(2);
        auto flat = Connection::flat(chart);
        std::vector<std::vector<double>> pts{{0.1, 0.2}};
        auto rep = weylab::ma_residual(unit_density(chart), 1, flat, pts);
        // det H = 0, so the residual is exactly -sigma^{-4} = -1: a reported
        // non-solution, not an error
        CHECK(rep.residual[0] == doctest::Approx(-1.0));
    }
}

TEST_CASE("scaling laws of the two sides") {
    const int n = 2;
    auto chart = Chart::make(n, Chart::Domain::UnitBall);
    auto flat = Connection::flat(chart);
    DensityField sigma = klein_density(chart);
    const double c = 1.7;
    DensityField scaled = DensityField::make(chart, Rational(1), sigma.component * c);
    TensorField H = weylab::projective_hessian(sigma, flat);
    TensorField Hc = weylab::projective_hessian(scaled, flat);
    for (const auto& x : sample_points(n, 6, 0.45)) {
        weylab::BatchEvaluator ev(x);
        double d = weylab::eval_matrix(H, ev).determinant();
        double dc = weylab::eval_matrix(Hc, ev).determinant();
        CHECK(dc == doctest::Approx(std::pow(c, n) * d).epsilon(1e-12));
        double sv = ev.eval(sigma.component);
        CHECK(std::pow(c * sv, -(n + 2)) ==
              doctest::Approx(std::pow(c, -(n + 2)) * std::pow(sv, -(n + 2)))
                  .epsilon(1e-12));
    }
}

TEST_CASE("epsilon contraction equals the matrix determinant") {
    for (int n : {2, 3}) {
        auto chart = Chart::make(n);
        std::mt19937_64 rng(90 + n);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        TensorField g = TensorField::build(chart, 0, 2, Rational(0),
                                           [&](std::span<const int>) {
            ScalarField f = ScalarField::constant(n, dist(rng));
            for (int a = 0; a < n; ++a)
                f = f + dist(rng) * ScalarField::coordinate(n, a);
            return f;
        });
        ScalarField d_eps = weylab::det_by_epsilon(g);
        ScalarField d_lap = weylab::det_form(g);
        for (const auto& x : sample_points(n, 6, 0.8)) {
            double expect = weylab::eval_matrix(g, x).determinant();
            CHECK(d_eps.eval(x) == doctest::Approx(expect).epsilon(1e-12));
            CHECK(d_lap.eval(x) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("weight bookkeeping of the tautological volume") {
    auto chart = Chart::make(3);
    TensorField eps = weylab::tautological_volume(chart);
    CHECK(eps.weight() == Rational(-4));
    CHECK(eps.contra() == 3);
    std::vector<double> x{0.1, 0.2, 0.3};
    CHECK(eps.at({0, 1, 2}).eval(x) == doctest::Approx(1.0));
    CHECK(eps.at({1, 0, 2}).eval(x) == doctest::Approx(-1.0));
    CHECK(eps.at({0, 0, 2}).eval(x) == doctest::Approx(0.0));
    // weights are additive under tensor product: two epsilons plus n copies
    // of the weight-1 Hessian makes the declared total weight -n-2
    TensorField two_eps = weylab::tensor_product(eps, eps);
    CHECK(two_eps.weight() == Rational(-8));
    auto ball = Chart::make(3, Chart::Domain::UnitBall);
    TensorField H = weylab::projective_hessian(klein_density(ball),
                                               Connection::flat(ball));
    Rational total = Rational(-2 * 4) + Rational(3 * 1);
    CHECK(total == Rational(-5));  // = -(n+2) for n = 3
    CHECK(H.weight() == Rational(1));
}

TEST_CASE("convexity certificate") {
    const int n = 2;
    auto chart = Chart::make(n, Chart::Domain::UnitBall);
    auto flat = Connection::flat(chart);
    auto pts = sample_points(n, 10, 0.45);
    {
        auto cert = weylab::convexity_certificate(klein_density(chart), flat, pts);
        CHECK(cert.is_ma_solution);
        CHECK(cert.rho_positive_definite);
        CHECK(cert.minimal_lagrangian_residual <= 1e-9);
        CHECK(cert.scale == doctest::Approx(1.0).epsilon(1e-10));
    }
    {
        auto cert = weylab::convexity_certificate(unit_density(chart), flat, pts);
        CHECK_FALSE(cert.is_ma_solution);
        CHECK_FALSE(cert.rho_positive_definite);
        CHECK(cert.minimal_lagrangian_residual == doctest::Approx(0.0));
    }
    {
        DensityField sigma = klein_density(chart);
        DensityField perturbed = DensityField::make(
            chart, Rational(1),
            sigma.component * (1.0 + 0.1 * ScalarField::coordinate(n, 0)));
        auto cert = weylab::convexity_certificate(perturbed, flat, pts);
        CHECK_FALSE(cert.is_ma_solution);
        int sign = 1;
        auto rep = weylab::ma_residual(perturbed, sign, flat, pts);
        CHECK(rep.max_residual > 1e-3);
    }
    {
        auto conn = random_poly_connection(3, 99);
        DensityField sigma = unit_density(conn.chart);
        auto pts3 = sample_points(3, 5, 0.4);
        CHECK_THROWS_AS(weylab::convexity_certificate(sigma, conn, pts3),
                        weylab::NotFlatError);
    }
}
