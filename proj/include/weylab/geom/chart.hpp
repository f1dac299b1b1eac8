#pragma once

#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "weylab/field/expr.hpp"

namespace weylab {

// Exact rational number used for density weights, so weight bookkeeping
// (e.g. w/(n+1) connection terms) never accumulates floating-point error.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    constexpr Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d);

    long long num() const { return num_; }
    long long den() const { return den_; }
    double as_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_zero() const { return num_ == 0; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }
    friend bool operator==(const Rational&, const Rational&) = default;

private:
    long long num_, den_;
};

// A single coordinate chart with a simple open domain. All fields and tensors
// in this library live on one chart; there are no atlases or transition maps.
class Chart {
public:
    enum class Domain {
        Whole,         // all of R^n
        UnitBall,      // open unit ball |x| < 1
        BaseUnitBall,  // first dim/2 coordinates in the open unit ball,
                       // remaining coordinates unconstrained (bundle charts)
    };

    static std::shared_ptr<const Chart> make(int dim, Domain domain = Domain::Whole);

    int dim() const { return dim_; }
    Domain domain() const { return domain_; }
    bool contains(std::span<const double> p) const;
    std::string coord_name(int i) const { return "x" + std::to_string(i + 1); }

private:
    Chart(int dim, Domain domain) : dim_(dim), domain_(domain) {}
    int dim_;
    Domain domain_;
};

using ChartPtr = std::shared_ptr<const Chart>;

struct PointSample {
    std::vector<double> point;
};

// Raw partial derivatives of f at `point`, keyed by multi-index, up to total
// `order` (capped at 4). Checks the chart domain before evaluating.
std::map<std::vector<int>, double> jet_evaluate(const ScalarField& f, const Chart& chart,
                                                std::span<const double> point, int order);

}  // namespace weylab
