#pragma once

#include <span>
#include <vector>

#include "weylab/jet/layout.hpp"

namespace weylab {

// Truncated Taylor expansion of a function of `layout().dim()` variables at a
// point, up to total order `layout().order()`. Coefficients are stored
// Taylor-normalized (coefficient of (x-p)^alpha, i.e. the raw partial divided
// by alpha!); raw_partial()/raw_partials() convert back. Arithmetic is exact
// truncated-series algebra, so derivatives are exact to machine precision for
// the supported primitives.
class Jet {
public:
    Jet() : layout_(nullptr) {}
    explicit Jet(const JetLayout& layout)
        : layout_(&layout), c_(static_cast<size_t>(layout.size()), 0.0) {}

    static Jet constant(const JetLayout& layout, double v);
    static Jet variable(const JetLayout& layout, int var, double value);

    const JetLayout& layout() const { return *layout_; }
    int size() const { return static_cast<int>(c_.size()); }
    double value() const { return c_[0]; }
    double operator[](int i) const { return c_[i]; }
    double& operator[](int i) { return c_[i]; }
    std::span<const double> coeffs() const { return c_; }

    // Raw partial derivative for the multi-index at layout index i.
    double raw_partial(int i) const { return c_[i] * layout_->factorial(i); }

    Jet operator-() const;
    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator+=(double s) { c_[0] += s; return *this; }
    Jet& operator-=(double s) { c_[0] -= s; return *this; }
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator+(Jet a, double s) { a += s; return a; }
    friend Jet operator+(double s, Jet a) { a += s; return a; }
    friend Jet operator-(Jet a, double s) { a -= s; return a; }
    friend Jet operator-(double s, const Jet& a) { Jet r = -a; r += s; return r; }
    friend Jet operator*(Jet a, double s) { a *= s; return a; }
    friend Jet operator*(double s, Jet a) { a *= s; return a; }
    friend Jet operator/(Jet a, double s) { a *= 1.0 / s; return a; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

    Jet reciprocal() const;

    // Jet of d/dx_var, one order lower on the same dimension.
    Jet derivative(int var) const;

    // Truncation to a lower order (same dimension).
    Jet truncated(int order) const;

    // Composition f(g_1,...,g_p): `outer` lives on p variables, each inner jet
    // on a common layout; the result lives on the inner layout. The inner
    // values must equal the expansion point of `outer`, i.e. outer was
    // expanded at (g_1(x0),...,g_p(x0)).
    static Jet compose(const Jet& outer, std::span<const Jet> inner);

    // Composition with a univariate analytic function given by the raw
    // derivative values f^(0..k)(u0) at u0 = value().
    Jet compose_univariate(std::span<const double> raw_derivs) const;

private:
    const JetLayout* layout_;
    std::vector<double> c_;
};

Jet sqrt(const Jet& u);
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet pow_int(const Jet& u, int k);

}  // namespace weylab
