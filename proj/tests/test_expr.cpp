#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "weylab/errors.hpp"
#include "weylab/field/expr.hpp"
#include "weylab/field/parser.hpp"
#include "weylab/geom/chart.hpp"

using weylab::Jet;
using weylab::JetLayout;
using weylab::ScalarField;

namespace {

ScalarField sample_field(int dim) {
    // f = exp(x*y) + sqrt(1+x^2) * log(2+y) - x^3/(1+y^2) on the first two coords
    ScalarField x = ScalarField::coordinate(dim, 0);
    ScalarField y = ScalarField::coordinate(dim, 1);
    return weylab::exp(x * y) + weylab::sqrt(x * x + 1.0) * weylab::log(y + 2.0) -
           weylab::pow_int(x, 3) / (y * y + 1.0);
}

double f_plain(double x, double y) {
    return std::exp(x * y) + std::sqrt(1 + x * x) * std::log(2 + y) -
           x * x * x / (1 + y * y);
}

}  // namespace

TEST_CASE("field evaluation matches plain arithmetic") {
    ScalarField f = sample_field(2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-0.7, 0.7);
    for (int t = 0; t < 10; ++t) {
        std::array<double, 2> p{dist(rng), dist(rng)};
        CHECK(f.eval(p) == doctest::Approx(f_plain(p[0], p[1])).epsilon(1e-13));
    }
}

TEST_CASE("field jets match direct jet construction") {
    ScalarField f = sample_field(2);
    std::array<double, 2> p{0.35, -0.15};
    Jet viaField = f.eval_jet(p, 4);
    const auto& L = JetLayout::get(2, 4);
    Jet jx = Jet::variable(L, 0, p[0]);
    Jet jy = Jet::variable(L, 1, p[1]);
    Jet direct = weylab::exp(jx * jy) + weylab::sqrt(jx * jx + 1.0) * weylab::log(jy + 2.0) -
                 weylab::pow_int(jx, 3) / (jy * jy + 1.0);
    REQUIRE(viaField.size() == direct.size());
    for (int i = 0; i < direct.size(); ++i)
        CHECK(viaField[i] == doctest::Approx(direct[i]).epsilon(1e-12));
}

TEST_CASE("symbolic derivative equals jet partial") {
    ScalarField f = sample_field(2);
    ScalarField fx = f.derivative(0);
    ScalarField fxy = fx.derivative(1);
    std::array<double, 2> p{0.2, 0.4};
    Jet j = f.eval_jet(p, 3);
    const auto& L = j.layout();
    CHECK(fx.eval(p) == doctest::Approx(j.raw_partial(L.index_of(std::vector<int>{1, 0}))));
    CHECK(fxy.eval(p) == doctest::Approx(j.raw_partial(L.index_of(std::vector<int>{1, 1}))));
    // Nested derivatives of a degree-4 polynomial terminate exactly.
    ScalarField x = ScalarField::coordinate(2, 0);
    ScalarField q = weylab::pow_int(x, 4);
    ScalarField q4 = q.derivative(0).derivative(0).derivative(0).derivative(0);
    CHECK(q4.eval(p) == doctest::Approx(24.0));
}

TEST_CASE("embed re-reads inputs from mapped coordinates") {
    // g(u,v) = u^2 v on 2 vars, embedded into 4 vars as coordinates (3, 1)
    ScalarField u = ScalarField::coordinate(2, 0);
    ScalarField v = ScalarField::coordinate(2, 1);
    ScalarField g = u * u * v;
    std::array<int, 2> map{3, 1};
    ScalarField big = g.embed(4, map);
    CHECK(big.dim() == 4);
    std::array<double, 4> p{9.0, 2.0, 9.0, 5.0};  // u -> x4 = 5, v -> x2 = 2
    CHECK(big.eval(p) == doctest::Approx(50.0));
    Jet j = big.eval_jet(p, 2);
    const auto& L = j.layout();
    // d/dx4 = 2uv = 20, d/dx2 = u^2 = 25, d2/dx4 dx2 = 2u = 10
    CHECK(j.raw_partial(L.index_of(std::vector<int>{0, 0, 0, 1})) == doctest::Approx(20.0));
    CHECK(j.raw_partial(L.index_of(std::vector<int>{0, 1, 0, 0})) == doctest::Approx(25.0));
    CHECK(j.raw_partial(L.index_of(std::vector<int>{0, 1, 0, 1})) == doctest::Approx(10.0));
    CHECK(j.raw_partial(L.index_of(std::vector<int>{1, 0, 0, 0})) == doctest::Approx(0.0));
}

TEST_CASE("compose substitutes fields into fields") {
    // F(u,v) = u*exp(v); u = x^2+y, v = x-y. Compare against the direct field.
    ScalarField U = ScalarField::coordinate(2, 0);
    ScalarField V = ScalarField::coordinate(2, 1);
    ScalarField F = U * weylab::exp(V);
    ScalarField x = ScalarField::coordinate(2, 0);
    ScalarField y = ScalarField::coordinate(2, 1);
    ScalarField gu = x * x + y;
    ScalarField gv = x - y;
    ScalarField comp = ScalarField::compose(F, {gu, gv});
    ScalarField direct = gu * weylab::exp(gv);
    std::array<double, 2> p{0.3, -0.6};
    Jet a = comp.eval_jet(p, 3);
    Jet b = direct.eval_jet(p, 3);
    for (int i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    // Derivatives of a composition are still exact fields.
    std::array<double, 2> q{-0.2, 0.5};
    CHECK(comp.derivative(0).eval(q) == doctest::Approx(direct.derivative(0).eval(q)));
}

TEST_CASE("constant folding keeps trivial algebra flat") {
    ScalarField x = ScalarField::coordinate(3, 0);
    ScalarField z = ScalarField::constant(3, 0.0);
    CHECK((x * z).is_zero());
    CHECK((z / x).is_zero());
    CHECK((x + z).node() == x.node());
    CHECK((x * ScalarField::constant(3, 1.0)).node() == x.node());
    CHECK(ScalarField::constant(3, 2.0).derivative(1).is_zero());
    CHECK(weylab::pow_int(x, 1).node() == x.node());
    auto c = (ScalarField::constant(3, 2.0) * ScalarField::constant(3, 3.0)).constant_value();
    REQUIRE(c.has_value());
    CHECK(*c == 6.0);
}

TEST_CASE("order cap and shape errors") {
    ScalarField f = sample_field(2);
    std::array<double, 2> p{0.1, 0.1};
    CHECK_THROWS_AS((void)f.eval_jet(p, 5), weylab::OrderError);
    std::array<double, 3> bad{0.1, 0.1, 0.1};
    CHECK_THROWS_AS((void)f.eval_jet(bad, 2), weylab::ShapeError);
    ScalarField g3 = ScalarField::coordinate(3, 0);
    CHECK_THROWS_AS((void)(f + g3), weylab::ShapeError);
}

TEST_CASE("singular expressions raise domain errors at evaluation") {
    ScalarField x = ScalarField::coordinate(2, 0);
    ScalarField y = ScalarField::coordinate(2, 1);
    std::array<double, 2> p{0.0, 2.0};
    CHECK_THROWS_AS((void)(y / x).eval(p), weylab::DomainError);
    CHECK_THROWS_AS((void)weylab::log(x).eval(p), weylab::DomainError);
    CHECK_THROWS_AS((void)weylab::sqrt(-y).eval(p), weylab::DomainError);
    CHECK_THROWS_AS((void)weylab::guard_nonzero(x, 1e-12, "test form").eval(p),
                    weylab::SingularFormError);
    CHECK(weylab::guard_nonzero(y, 1e-12, "test form").eval(p) == doctest::Approx(2.0));
}

TEST_CASE("parser round-trips the documented grammar") {
    std::array<double, 2> p{0.4, -0.3};
    auto chk = [&](std::string_view src, double want) {
        ScalarField f = weylab::parse_field(src, 2);
        CHECK(f.eval(p) == doctest::Approx(want).epsilon(1e-13));
    };
    chk("1 + 2*3", 7.0);
    chk("x1", 0.4);
    chk("x1^2 + x2^2", 0.25);
    chk("-x1^2", -0.16);             // unary minus binds looser than ^
    chk("2*x1 - x2/2", 0.95);
    chk("sqrt(1 - x1^2 - x2^2)", std::sqrt(1 - 0.16 - 0.09));
    chk("exp(x1*x2) + log(2 + x2)", std::exp(-0.12) + std::log(1.7));
    chk("x1^-2", 1.0 / 0.16);
    chk("((x1))", 0.4);
    chk("1.5e2 * x2", -45.0);
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS((void)weylab::parse_field("x1 +", 2), weylab::ParseError);
    CHECK_THROWS_AS((void)weylab::parse_field("x3", 2), weylab::ParseError);
    CHECK_THROWS_AS((void)weylab::parse_field("x0", 2), weylab::ParseError);
    CHECK_THROWS_AS((void)weylab::parse_field("sin(x1)", 2), weylab::ParseError);
    CHECK_THROWS_AS((void)weylab::parse_field("x1^x2", 2), weylab::ParseError);
    CHECK_THROWS_AS((void)weylab::parse_field("(x1", 2), weylab::ParseError);
    CHECK_THROWS_AS((void)weylab::parse_field("x1 x2", 2), weylab::ParseError);
    CHECK_THROWS_AS((void)weylab::parse_field("sqrt x1", 2), weylab::ParseError);
}

TEST_CASE("chart domains and jet_evaluate") {
    auto ball = weylab::Chart::make(2, weylab::Chart::Domain::UnitBall);
    auto plane = weylab::Chart::make(2);
    std::array<double, 2> in{0.3, 0.4};
    std::array<double, 2> outp{0.8, 0.7};
    CHECK(ball->contains(in));
    CHECK_FALSE(ball->contains(outp));
    CHECK(plane->contains(outp));
    CHECK(ball->coord_name(1) == "x2");
    CHECK_THROWS_AS((void)weylab::Chart::make(1), weylab::ShapeError);

    ScalarField f = weylab::parse_field("x1^2 * x2", 2);
    auto jets = weylab::jet_evaluate(f, *ball, in, 2);
    CHECK(jets[{0, 0}] == doctest::Approx(0.036));
    CHECK(jets[{1, 0}] == doctest::Approx(2 * 0.3 * 0.4));
    CHECK(jets[{2, 0}] == doctest::Approx(0.8));
    CHECK(jets[{1, 1}] == doctest::Approx(0.6));
    CHECK_THROWS_AS((void)weylab::jet_evaluate(f, *ball, outp, 2), weylab::DomainError);
}

TEST_CASE("rational weights") {
    using weylab::Rational;
    Rational w(1, 3);
    CHECK(w + Rational(2, 3) == Rational(1));
    CHECK(Rational(4, 6) == Rational(2, 3));
    CHECK((Rational(-3) / Rational(6)).num() == -1);
    CHECK((Rational(-3) / Rational(6)).den() == 2);
    CHECK(Rational(5, 2).as_double() == doctest::Approx(2.5));
    CHECK_THROWS_AS((void)Rational(1, 0), weylab::DomainError);
}
