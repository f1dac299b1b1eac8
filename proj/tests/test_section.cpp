#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "weylab/errors.hpp"
#include "weylab/section/section.hpp"

using weylab::AmbientConnection;
using weylab::BundleSpace;
using weylab::Chart;
using weylab::Connection;
using weylab::Rational;
using weylab::ScalarField;
using weylab::TensorField;
using weylab::WeylSection;

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

TensorField random_poly_section(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    auto chart = Chart::make(n);
    return TensorField::build(chart, 0, 1, Rational(0), [&](std::span<const int>) {
        ScalarField f = ScalarField::constant(n, dist(rng));
        for (int a = 0; a < n; ++a) {
            ScalarField xa = ScalarField::coordinate(n, a);
            f = f + dist(rng) * xa;
            for (int b = a; b < n; ++b)
                f = f + dist(rng) * xa * ScalarField::coordinate(n, b);
        }
        return f;
    });
}

// Convex potential with a random cubic wiggle; its Hessian dominates the
// induced Rho near the origin, keeping the section non-degenerate.
ScalarField random_potential(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.15, 0.15);
    ScalarField f = ScalarField::constant(n, 0.0);
    for (int a = 0; a < n; ++a) {
        ScalarField xa = ScalarField::coordinate(n, a);
        f = f + 0.5 * xa * xa;
        for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c)
                f = f + dist(rng) * xa * ScalarField::coordinate(n, b) *
                        ScalarField::coordinate(n, c);
    }
    return f;
}

std::mt19937_64 g_rng(11);

std::vector<std::vector<double>> sample_points(int dim, int count, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    for (auto& p : pts)
        for (auto& v : p) v = dist(g_rng);
    return pts;
}

TensorField zero_section(int n) { return TensorField(Chart::make(n), 0, 1); }

Connection klein_connection(int n) {
    auto chart = Chart::make(n, Chart::Domain::UnitBall);
    return Connection::levi_civita(weylab::klein_ball_metric(chart));
}

TensorField klein_zero_section(int n) {
    return TensorField(Chart::make(n, Chart::Domain::UnitBall), 0, 1);
}

}  // namespace

TEST_CASE("classification: flat, Klein, and skew examples") {
    auto pts = sample_points(2, 8, 0.45);
    {
        auto s = WeylSection::make(Connection::flat(Chart::make(2)), zero_section(2));
        auto c = weylab::classify_section(s, pts);
        CHECK(c.lagrangian);
        CHECK_FALSE(c.nondegenerate);
        CHECK(c.pullback_residual <= 1e-9);
    }
    {
        auto s = WeylSection::make(klein_connection(2), klein_zero_section(2));
        auto c = weylab::classify_section(s, pts);
        CHECK(c.lagrangian);
        CHECK(c.nondegenerate);
        CHECK(c.pullback_residual <= 1e-9);
        // Rho of the zero section is the Klein metric itself: positive definite
        for (const auto& x : pts) {
            Eigen::MatrixXd P = weylab::eval_matrix(s.rho_s, x);
            Eigen::MatrixXd g =
                weylab::eval_matrix(weylab::klein_ball_metric(s.nabla0.chart), x);
            CHECK((P - g).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(P).eigenvalues()
                      .minCoeff() > 0);
        }
    }
    {
        // generic psi over a generic connection: Rho picks up a skew part
        auto conn = random_poly_connection(2, 21);
        auto s = WeylSection::make(conn, random_poly_section(2, 22));
        auto c = weylab::classify_section(s, pts);
        CHECK_FALSE(c.lagrangian);
        CHECK(c.max_skew > 1e-4);
        CHECK(c.pullback_residual <= 1e-9);
    }
}

TEST_CASE("lagrangian_section kills the skew part of Rho") {
    for (int n : {2, 3}) {
        auto pts = sample_points(n, 6, 0.45);
        auto conn = random_poly_connection(n, 100 + n);
        auto psi = weylab::lagrangian_section(conn, random_potential(n, 200 + n));
        auto s = WeylSection::make(conn, psi);
        auto c = weylab::classify_section(s, pts);
        CHECK(c.lagrangian);
        CHECK(c.max_skew <= 1e-10);
        CHECK(c.nondegenerate);
        CHECK(c.pullback_residual <= 1e-9);
    }
}

TEST_CASE("second fundamental forms: hand-computed point and identities") {
    const int n = 2;
    auto chart = Chart::make(n);
    // psi = d phi for phi = (x^3 + y^3)/6 + (x^2 + y^2)/2 over the flat base:
    // Rho = diag(1 + x, 1 + y) - psi (x) psi, and at the origin
    // grad_i Rho_ja = d_i Rho_ja with the only nonzero entries
    // grad_1 Rho_11 = grad_2 Rho_22 = 1, so II_D = II_h there with
    // II^1_11 = II^2_22 = -1/2.
    ScalarField x = ScalarField::coordinate(n, 0), y = ScalarField::coordinate(n, 1);
    ScalarField phi = (x * x * x + y * y * y) * (1.0 / 6.0) + 0.5 * (x * x + y * y);
    auto s = WeylSection::make(Connection::flat(chart),
                               weylab::lagrangian_section(Connection::flat(chart), phi));
    std::vector<std::vector<double>> origin{{0.0, 0.0}};
    auto ff = weylab::second_fundamental_forms(s, origin);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double expect = (k == i && i == j) ? -0.5 : 0.0;
                CHECK(ff.ii_d.at({k, i, j}).eval(origin[0]) ==
                      doctest::Approx(expect).epsilon(1e-12));
                CHECK(ff.ii_h.at({k, i, j}).eval(origin[0]) ==
                      doctest::Approx(expect).epsilon(1e-12));
            }

    // II_h - II_D = -1/2 P^{ka}(grad_j P_ia - grad_a P_ij) away from 0 too
    auto pts = sample_points(n, 6, 0.4);
    auto conn = random_poly_connection(n, 301);
    auto s2 = WeylSection::make(
        conn, weylab::lagrangian_section(conn, random_potential(n, 302)));
    auto ff2 = weylab::second_fundamental_forms(s2, pts);
    TensorField pinv =
        weylab::inverse_form(weylab::symmetrize(s2.rho_s, true, {0, 1}));
    TensorField gp = weylab::covariant_derivative(s2.rho_s, s2.nabla_s.gamma);
    TensorField rhs = TensorField::build(conn.chart, 1, 2, Rational(0),
                                         [&](std::span<const int> idx) {
        const int k = idx[0], i = idx[1], j = idx[2];
        ScalarField acc = ScalarField::constant(n, 0.0);
        for (int a = 0; a < n; ++a)
            acc = acc + pinv.at({k, a}) * (gp.at({j, i, a}) - gp.at({a, i, j}));
        return acc * -0.5;
    });
    TensorField diff = ff2.ii_h - ff2.ii_d - rhs;
    for (const auto& p : pts) CHECK(weylab::max_abs(diff, p) <= 1e-10);
    // the Levi-Civita form is symmetric in its covariant slots
    TensorField skew = weylab::alternate(ff2.ii_h, true, {0, 1});
    for (const auto& p : pts) CHECK(weylab::max_abs(skew, p) <= 1e-10);
}

TEST_CASE("second fundamental forms: Klein section is totally geodesic") {
    for (int n : {2, 3}) {
        auto pts = sample_points(n, 5, 0.4);
        auto s = WeylSection::make(klein_connection(n), klein_zero_section(n));
        auto ff = weylab::second_fundamental_forms(s, pts);
        for (const auto& p : pts) {
            CHECK(weylab::max_abs(ff.ii_d, p) <= 1e-9);
            CHECK(weylab::max_abs(ff.ii_h, p) <= 1e-9);
        }
        auto ed = weylab::extrinsic_ii_oracle(s, AmbientConnection::CanonicalD, pts);
        auto eh = weylab::extrinsic_ii_oracle(s, AmbientConnection::LeviCivitaH, pts);
        for (size_t t = 0; t < pts.size(); ++t)
            for (int k = 0; k < n; ++k) {
                CHECK(ed[t][k].cwiseAbs().maxCoeff() <= 1e-9);
                CHECK(eh[t][k].cwiseAbs().maxCoeff() <= 1e-9);
            }
    }
}

TEST_CASE("extrinsic oracle matches the formula route") {
    const int n = 2;
    auto pts = sample_points(n, 10, 0.4);
    for (unsigned seed : {410u, 411u, 412u}) {
        auto conn = random_poly_connection(n, seed);
        auto s = WeylSection::make(
            conn, weylab::lagrangian_section(conn, random_potential(n, seed + 50)));
        auto ff = weylab::second_fundamental_forms(s, pts);
        auto ed = weylab::extrinsic_ii_oracle(s, AmbientConnection::CanonicalD, pts);
        auto eh = weylab::extrinsic_ii_oracle(s, AmbientConnection::LeviCivitaH, pts);
        double scale = 0;
        for (size_t t = 0; t < pts.size(); ++t)
            for (int k = 0; k < n; ++k)
                scale = std::max(scale, ed[t][k].cwiseAbs().maxCoeff());
        CHECK(scale > 1e-3);  // non-trivial comparison
        for (size_t t = 0; t < pts.size(); ++t) {
            weylab::BatchEvaluator ev(pts[t]);
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        CHECK(ed[t][k](i, j) ==
                              doctest::Approx(ev.eval(ff.ii_d.at({k, i, j})))
                                  .epsilon(1e-7));
                        CHECK(eh[t][k](i, j) ==
                              doctest::Approx(ev.eval(ff.ii_h.at({k, i, j})))
                                  .epsilon(1e-7));
                    }
        }
    }
}

TEST_CASE("ambient D and Levi-Civita agree on a flat projective class") {
    // any section over the flat base lives in a projectively flat class,
    // where the contorsion vanishes and both ambient connections coincide
    const int n = 2;
    auto pts = sample_points(n, 6, 0.4);
    auto flat = Connection::flat(Chart::make(n));
    auto s = WeylSection::make(
        flat, weylab::lagrangian_section(flat, random_potential(n, 501)));
    auto ed = weylab::extrinsic_ii_oracle(s, AmbientConnection::CanonicalD, pts);
    auto eh = weylab::extrinsic_ii_oracle(s, AmbientConnection::LeviCivitaH, pts);
    for (size_t t = 0; t < pts.size(); ++t)
        for (int k = 0; k < n; ++k)
            CHECK((ed[t][k] - eh[t][k]).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("normal projection is h-orthogonal to the graph tangent space") {
    const int n = 2;
    auto conn = random_poly_connection(n, 601);
    auto s = WeylSection::make(
        conn, weylab::lagrangian_section(conn, random_potential(n, 602)));
    auto bs = BundleSpace::make(conn);
    TensorField h = weylab::bundle_metric(bs);
    auto pts = sample_points(n, 5, 0.4);
    for (const auto& x : pts) {
        std::vector<double> p = s.graph_point(x);
        Eigen::MatrixXd H = weylab::eval_matrix(h, p);
        Eigen::MatrixXd P = weylab::eval_matrix(
            weylab::symmetrize(s.rho_s, true, {0, 1}), x);
        Eigen::MatrixXd A(n, n);
        weylab::BatchEvaluator ev(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = ev.eval(bs.A.at({i, j}));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                // tangent (xi, P xi) and normal (eta, -P eta) in frame
                // components; back to coordinates: v_psi = alpha - A^T v_x
                Eigen::VectorXd tan = Eigen::VectorXd::Zero(2 * n);
                tan[i] = 1.0;
                tan.tail(n) = P.col(i) - A.transpose() * tan.head(n);
                Eigen::VectorXd nor = Eigen::VectorXd::Zero(2 * n);
                nor[k] = 1.0;
                nor.tail(n) = -P.col(k) - A.transpose() * nor.head(n);
                CHECK(tan.dot(H * nor) == doctest::Approx(0.0).epsilon(1e-10));
            }
    }
}

TEST_CASE("residuals: Klein vanishes, generic sections do not") {
    {
        auto pts = sample_points(2, 6, 0.4);
        auto s = WeylSection::make(klein_connection(2), klein_zero_section(2));
        auto r = weylab::section_residuals(s, pts);
        CHECK(r.minimal_residual <= 1e-9);
        CHECK(r.totally_geodesic_residual <= 1e-9);
        for (const auto& mv : r.mean_curvature)
            CHECK(mv.cwiseAbs().maxCoeff() <= 1e-9);
    }
    {
        const int n = 2;
        auto pts = sample_points(n, 6, 0.4);
        auto conn = random_poly_connection(n, 701);
        auto s = WeylSection::make(
            conn, weylab::lagrangian_section(conn, random_potential(n, 702)));
        auto r = weylab::section_residuals(s, pts);
        CHECK(r.minimal_residual > 1e-4);
        CHECK(r.totally_geodesic_residual > 1e-4);
        // mean curvature and the minimal residual vanish together: they
        // differ by contraction with the invertible matrix -P^{-1}/2
        auto ff = weylab::second_fundamental_forms(s, pts);
        TensorField pinv =
            weylab::inverse_form(weylab::symmetrize(s.rho_s, true, {0, 1}));
        for (size_t t = 0; t < pts.size(); ++t) {
            weylab::BatchEvaluator ev(pts[t]);
            Eigen::MatrixXd Pi = weylab::eval_matrix(pinv, ev);
            Eigen::VectorXd trace = Eigen::VectorXd::Zero(n);
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        trace[k] += Pi(i, j) * ev.eval(ff.ii_h.at({k, i, j}));
            CHECK((trace - r.mean_curvature[t]).cwiseAbs().maxCoeff() <= 1e-9);
            double mc = r.mean_curvature[t].cwiseAbs().maxCoeff();
            CHECK(mc <= 0.5 * Pi.cwiseAbs().maxCoeff() * n * r.minimal_by_point[t] + 1e-12);
            CHECK(mc > 1e-6);  // nonzero alongside the minimal residual
        }
    }
}

TEST_CASE("error paths: degenerate and non-Lagrangian sections") {
    auto pts = sample_points(2, 4, 0.4);
    auto flat_zero =
        WeylSection::make(Connection::flat(Chart::make(2)), zero_section(2));
    CHECK_THROWS_AS(weylab::second_fundamental_forms(flat_zero, pts),
                    weylab::DegenerateSectionError);
    CHECK_THROWS_AS(weylab::section_residuals(flat_zero, pts),
                    weylab::DegenerateSectionError);
    auto conn = random_poly_connection(2, 801);
    auto skewed = WeylSection::make(conn, random_poly_section(2, 802));
    CHECK_THROWS_AS(weylab::second_fundamental_forms(skewed, pts),
                    weylab::NonLagrangianError);
}
